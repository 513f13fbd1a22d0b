#!/usr/bin/env python3
"""Build the package-delivery dataset, derive the ground-truth alignment for
every cell, and score two strawman aligners against it.

The 'echo' strawman turns every observed event into a synchronous move (it
never explains anything); the 'log-only' strawman declares every event a log
move.  Their distances bracket what a real conformance checker should beat.
"""
import argparse
import os
import sys
import tempfile

from logforge import fixtures, logio
from logforge.dataset import generate
from logforge.oracle import GtAlignment, Move, gt_alignment, move_distance


def strawman(gt: GtAlignment, kind: str) -> GtAlignment:
    per_object = {}
    for obj, moves in gt.per_object.items():
        kept = [m for m in moves if m.event_id]
        per_object[obj] = tuple(Move(kind, m.activity, m.objects, event_id=m.event_id)
                                for m in kept)
    return GtAlignment(system=tuple(m for ms in per_object.values() for m in ms),
                       per_object=per_object)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None, help="dataset dir (default: temp)")
    args = parser.parse_args()

    out = args.out or tempfile.mkdtemp(prefix="logforge-align-")
    net, grid = fixtures.fixture("package_delivery")
    manifest = generate(net, grid, out)
    m0 = logio.read_model(os.path.join(out, "m0.json"))

    print(f"{'cell':12s} {'patterns':10s} {'echo':>8s} {'log-only':>8s}")
    for entry in manifest.cells:
        trace = logio.read_trace(os.path.join(out, entry["paths"]["trace"]))
        log = logio.read_observed_jsonl(os.path.join(out, entry["paths"]["log_jsonl"]))
        gt = gt_alignment(m0, trace, log)
        echo = move_distance(strawman(gt, "synchronous"), gt)
        logonly = move_distance(strawman(gt, "log"), gt)
        codes = ",".join(entry["behavioral_codes"] + entry["recording_codes"]) or "clean"
        print(f"{entry['cell_id']:12s} {codes:10s} {echo:8.4f} {logonly:8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
