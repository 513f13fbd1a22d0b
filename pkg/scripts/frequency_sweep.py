#!/usr/bin/env python3
"""Sweep the deviation weight of the energy-contract fixture and report how
closely the simulated occurrence fractions track eps/(1+eps).

With one deviation at weight eps against a base alternative at weight 1, the
categorical sampler picks the deviation with probability eps/(1+eps) at every
choice point; by the law of large numbers the measured fraction converges.
"""
import argparse
import sys
from dataclasses import replace

from logforge import fixtures
from logforge.dataset import cell_seed
from logforge.simulate import run
from logforge.transform import apply_sequence


def measure(eps: float, contracts: int, seed: int) -> dict:
    net, grid = fixtures.fixture("energy_contract")
    behavioral, recording = fixtures._energy_apps()
    scaled = []
    for app in behavioral + recording:
        params = dict(app.params)
        if "weight" in params:
            params["weight"] = eps
        if "probability" in params:
            params["probability"] = eps / (1.0 + eps)
        scaled.append(replace(app, params=params))
    ms, _ = apply_sequence(net, [a for a in scaled if a.code.startswith("BI")])
    ml, _ = apply_sequence(ms, [a for a in scaled if a.code.startswith("RI")])
    config = replace(fixtures._energy_config(contracts), seed=seed, run_id="sweep")
    trace = run(ml, config)
    meter = sum(1 for r in trace.records if r.transition == "add_meter")
    out = {}
    for app, stats in sorted(trace.pattern_stats.items()):
        if app == "e_bi11":
            out[app] = (stats["fired"] / meter if meter else float("nan"), meter)
        else:
            cp = stats["choice_points"]
            out[app] = (stats["chosen"] / cp if cp else float("nan"), cp)
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--eps", type=float, nargs="*", default=[0.02, 0.05, 0.1, 0.2])
    parser.add_argument("--contracts", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=cell_seed(fixtures.ENERGY_MASTER_SEED, 0, 0, 0))
    args = parser.parse_args()

    for eps in args.eps:
        target = eps / (1.0 + eps)
        rows = measure(eps, args.contracts, args.seed)
        print(f"eps={eps:.3f}  target={target:.4f}")
        for app, (frac, n) in rows.items():
            print(f"  {app:10s} n={n:6d} measured={frac:.4f} diff={abs(frac - target):+.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
