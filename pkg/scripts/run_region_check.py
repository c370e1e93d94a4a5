#!/usr/bin/env python3
"""Arrangement region counts versus the closed formula (n^2 + n + 2) / 2.

Also reports the number of distinct constraint-membership patterns observed
over sampled defense vectors, which the region count must dominate.
"""

import argparse

from eqsmooth.experiments import region_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>3} {'regions':>8} {'formula':>8} {'match':>6} {'patterns':>9}")
    for n in range(1, args.max_n + 1):
        rep = region_check(n, seed=args.seed + n)
        print(
            f"{n:>3} {rep.regions:>8} {rep.formula:>8} {str(rep.match).lower():>6} "
            f"{rep.distinct_patterns:>9}"
        )


if __name__ == "__main__":
    main()
