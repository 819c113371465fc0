#!/usr/bin/env python3
"""Power/FDR versus non-null fraction for the Gaussian one-sided testing setup.

Compares saffron, saffron-ai, lord, and alpha-investing on the same discount
sequence across pi1 = 0.1 .. 0.9.  Writes the sweep table as CSV.

    python3 scripts/run_gaussian_sweep.py --mu-c 3 --out gaussian_mu3.csv
"""

import argparse
import sys
import time

from onlinefdr import (
    DataModel,
    GaussianMean,
    ProcedureSpec,
    SimConfig,
    grid,
    sweep,
    write_csv,
)

PI1_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu-c", type=float, default=3.0, help="mean of the alternative means")
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--gamma", default="power:1.6")
    ap.add_argument("--T", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=2)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    args = ap.parse_args()

    w0 = args.alpha / 2.0
    procs = [
        ProcedureSpec(name, args.alpha, w0, 0.5, args.gamma)
        for name in ("saffron", "saffron-ai", "lord", "alpha-investing")
    ]
    base = SimConfig(
        model=DataModel(GaussianMean(args.mu_c), pi1=0.5, T=args.T),
        procedure=procs[0],
        trials=args.trials,
        seed=args.seed,
    )
    start = time.time()
    rows = sweep(grid(base, PI1_GRID, procs), jobs=args.jobs)
    print(f"# {len(rows)} cells in {time.time() - start:.0f}s", file=sys.stderr)

    if args.out:
        with open(args.out, "w") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
