#!/usr/bin/env python3
"""PPBF against parallel-flip BF on one shared error sample per p (toric L=13 by default)."""

import argparse

from ppbf.sim import TrialConfig, grid, run_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="toric")
    ap.add_argument("--L", type=int, default=13)
    ap.add_argument("--p", default="0.01:0.10:0.01")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print("p,decoder,trials,failures,rate,ci_low,ci_high")
    for p in grid(*(float(x) for x in args.p.split(":"))):
        for decoder in ("ppbf", "classical-bf"):
            # same seed -> same error vectors for both decoders
            cfg = TrialConfig(args.family, args.L, p, seed=args.seed, max_trials=args.trials,
                              target_failures=10**9, decoder=decoder)
            pt = run_point(cfg, jobs=args.jobs)
            print(f"{p},{decoder},{pt.trials},{pt.failures},{pt.rate:.6f},{pt.ci_low:.6f},{pt.ci_high:.6f}",
                  flush=True)


if __name__ == "__main__":
    main()
