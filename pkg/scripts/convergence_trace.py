"""Print the refinement trace for x^2 on (0,1): cells, L, U and the gap per epoch.

    python3 scripts/convergence_trace.py --eps 1e-6 --csv trace.csv
"""

import argparse
import csv
import time
from fractions import Fraction

from partint.expr import Coord, Pow
from partint.funcrep import function
from partint.geometry import Box, format_rational
from partint.integrate import mimura_integrate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", default="1e-6")
    ap.add_argument("--power", type=int, default=2)
    ap.add_argument("--csv", help="also write the trace as CSV")
    args = ap.parse_args()
    f = function(Pow(Coord(0), Fraction(args.power)), Box((0,), (1,)), True)
    t0 = time.perf_counter()
    enc = mimura_integrate(f, eps=Fraction(args.eps), separable=False)
    dt = time.perf_counter() - t0
    print(f"{'epoch':>5} {'cells':>9} {'lower':>14} {'upper':>14} {'gap':>10}")
    for t in enc.trace:
        print(f"{t.iteration:5d} {t.cells:9d} {float(t.lower):14.10f} {float(t.upper):14.10f} {float(t.gap):10.3e}")
    exact = Fraction(1, args.power + 1)
    print(f"contains 1/{args.power + 1}: {enc.contains(exact)}, converged: {enc.converged}, {dt:.2f} s")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "cells", "L", "U", "gap"])
            for t in enc.trace:
                w.writerow([t.iteration, t.cells, format_rational(t.lower), format_rational(t.upper),
                            format_rational(t.gap)])


if __name__ == "__main__":
    main()
