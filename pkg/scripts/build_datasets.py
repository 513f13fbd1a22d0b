#!/usr/bin/env python3
"""Generate all three bundled datasets into out/datasets/<name>/.

Each dataset directory gets the base model, a manifest, and per-cell
model/ledger/trace/log files; rerunning reproduces byte-identical output.
"""
import argparse
import os
import sys
import time

from logforge import fixtures
from logforge.dataset import generate


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/datasets")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--only", choices=fixtures.FIXTURES, default=None)
    args = parser.parse_args()

    names = [args.only] if args.only else list(fixtures.FIXTURES)
    for name in names:
        net, grid = fixtures.fixture(name)
        out_dir = os.path.join(args.out, name)
        t0 = time.monotonic()
        manifest = generate(net, grid, out_dir, jobs=args.jobs)
        ok = sum(1 for e in manifest.cells if e["status"] == "ok")
        print(f"{name}: {ok}/{len(manifest.cells)} cells in "
              f"{time.monotonic() - t0:.1f}s -> {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
