#!/usr/bin/env python3
"""Generate a stand-in heart data file for offline use.

270 rows, 13 features, labels 1/2, space-delimited -- the same layout the
loader expects from the real Statlog file.  Feature marginals and the
label rule are synthetic but produce a learnable classification problem.
"""

import argparse

from modhtan.datasets import make_heart_fixture


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default="heart.dat")
    ap.add_argument("--rows", type=int, default=270)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    make_heart_fixture(args.out, n=args.rows, seed=args.seed)
    print(f"wrote {args.out} ({args.rows} rows, seed {args.seed})")


if __name__ == "__main__":
    main()
