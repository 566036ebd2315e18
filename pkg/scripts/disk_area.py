"""Inner/outer measure of the unit disk for a range of tolerances.

The enclosures tighten around pi as eps shrinks; the paving budget caps the
number of evaluated cells.
"""

import argparse
import math
import time
from fractions import Fraction

from partint.measure import measure_enclosure
from partint.parser import parse_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=1 << 21)
    args = ap.parse_args()
    disk = parse_set("level x^2 + y^2 < 1 in (-1,1)x(-1,1)")
    for k in range(1, 5):
        eps = Fraction(1, 10**k)
        t0 = time.perf_counter()
        enc = measure_enclosure(disk, eps, args.budget)
        dt = time.perf_counter() - t0
        ok = enc.inner <= math.pi <= enc.outer
        print(f"eps=1e-{k}: [{float(enc.inner):.8f}, {float(enc.outer):.8f}] "
              f"width {float(enc.width):.2e} contains pi: {ok} converged: {enc.converged} ({dt:.2f} s)")


if __name__ == "__main__":
    main()
