#!/usr/bin/env python3
"""Logical error rate curves and threshold estimate for one code family.

    python scripts/threshold_sweep.py --family toric --out results/toric.csv
"""

import argparse
import sys
from pathlib import Path

from ppbf.sim import csv_header, csv_line, estimate_threshold, grid, iter_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=("toric", "rotated-planar"), default="toric")
    ap.add_argument("--L", default="5,7,9,11", help="comma-separated lattice sizes")
    ap.add_argument("--p", default="0.06:0.09:0.005", help="start:stop:step")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-trials", type=int, default=100_000)
    ap.add_argument("--target-failures", type=int, default=100)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=None, help="CSV path (default: stdout)")
    args = ap.parse_args()

    Ls = [int(x) for x in args.L.split(",")]
    ps = grid(*(float(x) for x in args.p.split(":")))
    sink = open(args.out, "w") if args.out else sys.stdout
    print(csv_header(), file=sink)
    points = []
    for pt in iter_sweep(args.family, Ls, ps, args.seed, max_trials=args.max_trials,
                         target_failures=args.target_failures, jobs=args.jobs):
        points.append(pt)
        print(csv_line(pt, timing=True), file=sink, flush=True)
        print(f"L={pt.config.L:<3} p={pt.config.p:.3f} rate={pt.rate:.4f} ({pt.failures}/{pt.trials})",
              file=sys.stderr)
    est = estimate_threshold(points)
    print(est.describe(), file=sink)
    for small, big, x in est.crossings:
        print(f"crossing L={small}/{big}: p={x:.4f}", file=sys.stderr)
    if args.out:
        sink.close()


if __name__ == "__main__":
    main()
