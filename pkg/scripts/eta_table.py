#!/usr/bin/env python3
"""Print the rate exponent eta(p) on a grid of p in (p0(d), 2], in exact
rational arithmetic, for a chosen dimension parameter d.

Usage:
    python scripts/eta_table.py [--dim 3] [--points 12]
"""
import argparse
import sys
from fractions import Fraction

from mfdyn.bounds import eta_of, p0_of


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()

    p0 = p0_of(args.dim)
    print(f"d = {args.dim}, p0 = {p0} (eta defined for p in ({p0}, 2])")
    print(f"{'p':>10} {'eta':>10} {'p (float)':>12} {'eta (float)':>12}")
    for k in range(1, args.points + 1):
        p = p0 + k * (Fraction(2) - p0) / args.points
        e = eta_of(p, args.dim)
        print(f"{str(p):>10} {str(e):>10} {float(p):12.6f} {float(e):12.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
