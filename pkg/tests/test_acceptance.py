"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest; in
pytest the lines are repeated in the terminal summary.
"""

import math
import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402

from partint.cli import main  # noqa: E402
from partint.expr import Coord, Const  # noqa: E402
from partint.funcrep import function  # noqa: E402
from partint.geometry import Box, BoxUnion  # noqa: E402
from partint.integrate import mimura_integrate  # noqa: E402
from partint.measure import (  # noqa: E402
    PASS_EXACT,
    Boxes,
    continuity_check,
    sigma_additivity_check,
    subgraph_measure_check,
)
from partint.parser import parse_function  # noqa: E402
from partint.partition import Partition, common_refinement, decompose_open  # noqa: E402
from partint.theoremlab import (  # noqa: E402
    PASS,
    alternating_halves,
    dct_check,
    fatou_check,
    layer_cake_check,
    mct_check,
    powers,
    run_suite,
    sqrt_truncation,
)

UNIT = Box((0,), (1,))


def record(n: int, ok: bool, detail: str):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------------


def test_c01_dirichlet_exact(tmp_path):
    t0 = time.perf_counter()
    a, b = tmp_path / "mod.jsonl", tmp_path / "core.jsonl"
    rc1 = main(["integrate", "--f", "0 null_modify(rationals, 1)", "--domain", "(0,1)", "--trace", str(a)])
    rc2 = main(["integrate", "--f", "0", "--domain", "(0,1)", "--trace", str(b)])
    dt = time.perf_counter() - t0
    f = parse_function("0 null_modify(rationals, 1)", "(0,1)", nonnegative=True)
    enc = mimura_integrate(f)
    ok = (rc1 == rc2 == 0 and a.read_bytes() == b.read_bytes() and enc.lower == enc.upper == 0 and dt < 1.0)
    record(1, ok, f"Dirichlet [{enc.lower},{enc.upper}], identical traces {a.read_bytes() == b.read_bytes()}, "
                  f"{dt:.2f} s")


# 2 -------------------------------------------------------------------------------

POLYS = [("x", "(0,1)", F(1, 2)), ("x^2", "(0,1)", F(1, 3)), ("x^3", "(0,1)", F(1, 4)),
         ("x*y", "(0,1)x(0,1)", F(1, 4))]


def test_c02_polynomials():
    rows, ok = [], True
    for text, dom, value in POLYS:
        f = parse_function(text, dom, nonnegative=True)
        t0 = time.perf_counter()
        enc = mimura_integrate(f, eps=F(1, 10**6))
        dt = time.perf_counter() - t0
        good = enc.width < F(1, 10**6) and enc.contains(value) and dt < 30
        ok &= good
        rows.append(f"{text}:{'ok' if good else 'bad'}({float(enc.width):.1e},{dt:.1f}s)")
    record(2, ok, "widths < 1e-6 containing 1/2,1/3,1/4,1/4: " + " ".join(rows))


# 3 -------------------------------------------------------------------------------


def test_c03_riemann_criterion_trace():
    f = parse_function("x^2", "(0,1)", nonnegative=True)
    enc = mimura_integrate(f, eps=F(1, 10**6))
    tr = enc.trace
    gaps = [t.gap for t in tr]
    strictly = all(b < a for a, b in zip(gaps, gaps[1:]))
    reached = {k: any(g < F(1, 10**k) for g in gaps) for k in (2, 4, 6)}
    l_up = all(b.lower >= a.lower for a, b in zip(tr, tr[1:]))
    u_down = all(b.upper <= a.upper for a, b in zip(tr, tr[1:]))
    ok = strictly and all(reached.values()) and l_up and u_down
    record(3, ok, f"{len(tr)} epochs, gap strictly decreasing {strictly}, below 1e-2/1e-4/1e-6 "
                  f"{list(reached.values())}, L up {l_up}, U down {u_down}")


# 4 -------------------------------------------------------------------------------


def test_c04_subgraph_identity():
    rows, ok = [], True
    for text in ("3/4", "x", "x^2"):
        f = parse_function(text, "(0,1)", nonnegative=True)
        r = subgraph_measure_check(f, UNIT, F(1, 1000))
        overlap = max(r.left.lower, r.right.lower) <= min(r.left.upper, r.right.upper)
        good = r.status == "PASS" and overlap
        ok &= good
        rows.append(f"{text}:{r.status}")
    record(4, ok, "subgraph paving vs integral within 1e-3: " + " ".join(rows))


# 5 -------------------------------------------------------------------------------


def _random_partition(rng):
    cuts = sorted({F(rng.randint(1, 63), rng.randint(2, 64)) for _ in range(rng.randint(0, 8))} - {F(0), F(1)})
    cuts = [c for c in cuts if 0 < c < 1]
    xs = [F(0)] + cuts + [F(1)]
    return Partition.from_cells([Box((a,), (b,)) for a, b in zip(xs, xs[1:])])


def test_c05_box_algebra_exact():
    ok = True
    for d in (1, 2):
        for n in range(7):
            p = decompose_open(BoxUnion([Box.unit(d)]), scale=n)
            ok &= len(p) == 2 ** (d * n) and p.measure() == 1
    rng = random.Random(5)
    conserved = 0
    for _ in range(100):
        p, q = _random_partition(rng), _random_partition(rng)
        r = common_refinement(p, q)
        conserved += r.measure() == 1 and r.is_disjoint()
    ok &= conserved == 100
    record(5, ok, f"dyadic counts 2^(dN) with measure 1 for d<=2, N<=6; refinement conserved {conserved}/100")


# 6 -------------------------------------------------------------------------------


def test_c06_caratheodory_suite():
    t0 = time.perf_counter()
    checks = run_suite("caratheodory")
    dt = time.perf_counter() - t0
    exact = sum(all(v == PASS_EXACT for v in c.details["verdicts"]) for c in checks)
    same = sum(c.details["null_modified_identical"] for c in checks)
    ok = len(checks) == 50 and exact == 50 and same == 50 and dt < 10
    record(6, ok, f"{exact}/50 PASS-exact, {same}/50 null-modified identical, {dt:.2f} s")


# 7 -------------------------------------------------------------------------------


def test_c07_additivity_and_continuity():
    ladder = [Boxes(BoxUnion([Box((1 - F(1, 2 ** (k - 1)),), (1 - F(1, 2 ** k),))], 1)) for k in range(1, 21)]
    add = sigma_additivity_check(ladder)
    total_ok = add.exact and add.parts_total == (1 - F(1, 2 ** 20),) * 2 and add.union.inner == 1 - F(1, 2 ** 20)
    sets = [Boxes(BoxUnion([Box((0,), (1 - F(1, n),))], 1)) for n in [2 ** k for k in range(21)]]
    cont = continuity_check(sets, 1, eps=F(1, 10**6))
    ok = total_ok and cont.status == "PASS" and cont.monotone
    record(7, ok, f"ladder sum {add.union.inner}, continuity distance {float(cont.distance):.2e} "
                  f"monotone {cont.monotone}")


# 8 -------------------------------------------------------------------------------


def test_c08_layer_cake():
    r = layer_cake_check(function(Coord(0), UNIT, True), eps=F(1, 1000))
    lc, it = r.details["layer_cake"], r.details["integral"]
    half = F(1, 2)
    contains = lc[0] <= half <= lc[1] and it[0] <= half <= it[1]
    ok = contains and r.status == PASS
    record(8, ok, f"layer cake [{float(lc[0]):.6f},{float(lc[1]):.6f}] integral "
                  f"[{float(it[0]):.6f},{float(it[1]):.6f}] both contain 1/2, overlap within 1e-3")


# 9 -------------------------------------------------------------------------------


def test_c09_convergence_theorems():
    m = mct_check(sqrt_truncation(), F(1, 100))
    lo, hi = m.details["integrals"][-1]
    mct_ok = m.status == PASS and max(abs(2 - lo), abs(2 - hi)) <= F(1, 100)
    d = dct_check(powers(), function(Const(F(1)), UNIT, True), F(1, 1000))
    dlo, dhi = d.details["integrals"][-1]
    dct_ok = d.status == PASS and max(abs(dlo), abs(dhi)) <= F(1, 1000)
    f = fatou_check(alternating_halves(), margin=F(1, 4))
    fatou_ok = f.status == PASS and f.details["certified_gap"] >= F(1, 4)
    ok = mct_ok and dct_ok and fatou_ok
    record(9, ok, f"MCT tail [{float(lo):.4f},{float(hi):.4f}] vs 2, DCT tail <= {float(dhi):.2e}, "
                  f"Fatou gap {f.details['certified_gap']}")


# 10 ------------------------------------------------------------------------------


def test_c10_tonelli_fubini():
    checks = run_suite("tonelli")
    exact_ok, sep_ok = True, True
    for c in checks:
        det = c.details
        if det["exact"]:
            exact_ok &= det["product"] == det["inner_y_outer_x"] == det["inner_x_outer_y"]
        else:
            encs = [det["product"], det["inner_y_outer_x"], det["inner_x_outer_y"]]
            lo, hi = max(e[0] for e in encs), min(e[1] for e in encs)
            hull = max(e[1] for e in encs) - min(e[0] for e in encs)
            sep_ok &= lo <= hi and hull <= F(1, 10**4)
        exact_ok &= c.status == PASS
    ok = exact_ok and sep_ok
    record(10, ok, f"{len(checks)} fixtures, step identities exact {exact_ok}, separable within 1e-4 {sep_ok}")


# 11 ------------------------------------------------------------------------------

# independent Darboux oracle: extrema of each grid cell taken over its endpoints
# and the interior critical points of the fixture
ORACLES = {
    "riemann-x^2": (lambda x: x * x, [], 1),
    "riemann-sin(x)": (math.sin, [], 1),
    "riemann-exp(x)": (math.exp, [], 1),
    "riemann-x*(1-x)": (lambda x: x * (1 - x), [0.5], 1),
    "riemann-1+cos(3x)": (lambda x: 1 + math.cos(3 * x), [math.pi / 3, 2 * math.pi / 3], 2),
}


def _darboux(g, crit, width, n):
    cells = (1 << n) * width
    h = width / cells
    lows, highs = [], []
    for i in range(cells):
        a, b = i * h, (i + 1) * h
        pts = [a, b] + [c for c in crit if a < c < b]
        vals = [g(p) for p in pts]
        lows.append(min(vals) * h)
        highs.append(max(vals) * h)
    return math.fsum(lows), math.fsum(highs)


def test_c11_riemann_bracketing():
    checks = run_suite("riemann")
    slack = 1e-12
    ok, rows = len(checks) == 5, []
    for c in checks:
        g, crit, width = ORACLES[c.name]
        dl, du = _darboux(g, crit, width, 10)
        ml, mu = c.details["mimura"]
        w = float(mu - ml)
        good = c.status == PASS and dl <= float(ml) + w + slack and float(mu) <= du + w + slack
        ok &= good
        rows.append(f"{c.name.removeprefix('riemann-')}:{'ok' if good else 'bad'}")
    record(11, ok, "Darboux lower <= partition integral <= Darboux upper at mesh 2^-10: " + " ".join(rows))


# 12 ------------------------------------------------------------------------------


def test_c12_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    rc1 = main(["verify", "all", "--report", str(a)])
    rc2 = main(["verify", "all", "--report", str(b)])
    same = a.read_bytes() == b.read_bytes()
    ok = rc1 == rc2 == 0 and same
    record(12, ok, f"verify all exit codes {rc1},{rc2}, byte-identical reports {same}")


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_c"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
