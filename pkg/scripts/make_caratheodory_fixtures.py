"""Regenerate the shipped Caratheodory fixture pairs (E, [A, ...]).

Every set is a union of boxes with rational endpoints in (0,1)^d, d in {1, 2}.
The generator is seeded, so rerunning reproduces the file byte for byte.
"""

import argparse
import json
import random
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "partint" / "data" / "caratheodory_fixtures.json"
DENOMS = (2, 3, 4, 5, 6, 8, 16)


def interval(rng):
    q = rng.choice(DENOMS)
    a, b = sorted(rng.sample(range(q + 1), 2))
    return Fraction(a, q), Fraction(b, q)


def fmt(v):
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def box_text(rng, d):
    return "x".join(f"({fmt(a)},{fmt(b)})" for a, b in (interval(rng) for _ in range(d)))


def union_text(rng, d, most):
    return "box " + "|".join(box_text(rng, d) for _ in range(rng.randint(1, most)))


def generate(n, seed):
    rng = random.Random(seed)
    pairs = []
    for i in range(n):
        d = 1 if i % 2 == 0 else 2
        e = union_text(rng, d, 3)
        tests = [union_text(rng, d, 2) for _ in range(rng.randint(1, 3))]
        pairs.append({"E": e, "A": tests})
    return {"seed": seed, "dimension_max": 2, "pairs": pairs}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--out", default=str(OUT))
    args = ap.parse_args()
    data = generate(args.n, args.seed)
    Path(args.out).write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {len(data['pairs'])} pairs to {args.out}")


if __name__ == "__main__":
    main()
