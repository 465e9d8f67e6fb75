#!/usr/bin/env python3
"""Decide the whole relation spectrum for one pair of processes.

Usage: python scripts/spectrum.py LEFT.pi RIGHT.pi [--theory NAME|FILE]
       [--bounds depth=2,unfold=2,game=12]

Prints one line per relation, coarsest first, with the verdict class.
"""

import argparse
import time

from latspi.cli import load_process, load_theory, parse_bounds
from latspi.corpus import verdict_class
from latspi.games import Rel, check

ORDER = [
    Rel.PRESIM_I, Rel.SIM_I, Rel.BISIM_I,
    Rel.SIM_ST, Rel.BISIM_ST, Rel.FSIM_ST,
    Rel.SIM_HP, Rel.BISIM_HP, Rel.FSIM_HP,
    Rel.SIM_ILOC, Rel.BISIM_ILOC, Rel.SIM_IFULL, Rel.BISIM_IFULL,
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("left")
    ap.add_argument("right")
    ap.add_argument("--theory", default=None)
    ap.add_argument("--bounds", default=None)
    args = ap.parse_args()

    left = load_process(args.left)
    right = load_process(args.right)
    theory = load_theory(args.theory)
    bounds = parse_bounds(args.bounds)

    for rel in ORDER:
        t0 = time.perf_counter()
        v = check(rel, left, right, bounds, theory)
        dt = time.perf_counter() - t0
        print(f"{rel.value:<12} {verdict_class(v):<16} {dt:6.2f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
