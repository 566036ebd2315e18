"""Executable checks of the structural theorems on concrete fixtures.

Every check returns a :class:`CheckReport` whose details hold exact
rationals, so two runs produce identical reports.  Limits of sequences are
never computed: each catalogue sequence carries the closed form of its limit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable

import numpy as np

from .cells import Bases, Cells, grouped_exact_sum
from .expr import Abs, Const, Coord, Expr, Min, Mul, Piecewise, Pow, Sub, cos, evaluate, exp, sin
from .funcrep import FunctionRep, certify_nonnegative, ess_sup, eval_point, function
from .geometry import INF, Box, BoxUnion, format_rational, union_normalize
from .integrate import (
    IntegralEnclosure,
    agree,
    integrate_signed,
    is_step,
    mimura_integrate,
    separable_groups,
    step_integral,
)
from .measure import (
    PASS_EXACT,
    caratheodory_check,
    level_set_profile,
    subgraph_measure_check,
)

PASS, UNDECIDED, FAIL = "PASS", "UNDECIDED", "FAIL"


@dataclass
class CheckReport:
    name: str
    status: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status, "details": _jsonable(self.details)}


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return format_rational(v) if v in (INF, -INF) else repr(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "lower") and hasattr(v, "upper"):
        return {"lower": _jsonable(v.lower), "upper": _jsonable(v.upper)}
    return str(v)


def _enc(e) -> list:
    return [e.lower, e.upper]


def _distance(value, e) -> Fraction:
    """Distance from ``value`` to the enclosure ``e`` (0 when inside)."""
    if e.lower <= value <= e.upper:
        return Fraction(0)
    return e.lower - value if value < e.lower else value - e.upper


# -- sequences ------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    name: str
    term: Callable[[int], FunctionRep]
    indices: tuple
    monotone: bool = False
    limit_integral: Fraction | None = None  # closed form of the integral of the limit
    liminf: FunctionRep | None = None  # closed-form pointwise liminf (a.e.)
    period: int = 1


UNIT = Box((0,), (1,))
X = Coord(0)


def sqrt_truncation() -> SequenceSpec:
    """``min(x^(-1/2), n)`` on (0,1): integrals ``2 - 1/n`` increase to 2."""
    return SequenceSpec(
        "min(x^(-1/2), n)",
        lambda n: function(Min(Pow(X, Fraction(-1, 2)), Const(Fraction(n))), UNIT, True),
        tuple(1 << k for k in range(9)),
        monotone=True,
        limit_integral=Fraction(2),
    )


def scaled_constant(c=Fraction(3, 2)) -> SequenceSpec:
    c = Fraction(c)
    return SequenceSpec(
        f"(1 - 1/n) * {c}",
        lambda n: function(Const((1 - Fraction(1, n)) * c), UNIT, True),
        tuple(1 << k for k in range(11)),
        monotone=True,
        limit_integral=c,
    )


def square_truncation(window: int = 4) -> SequenceSpec:
    """``min(x^2, n)`` cut to ``(-n, n)`` then restricted to (0,1)."""
    return SequenceSpec(
        "min(x^2, n) on (0,1)",
        lambda n: function(Min(Pow(X, Fraction(2)), Const(Fraction(n))), UNIT, True),
        tuple(range(1, window + 1)),
        monotone=True,
        limit_integral=Fraction(1, 3),
    )


def powers() -> SequenceSpec:
    """``x^n`` on (0,1) with ``n = 1, 2, 4, ..., 4096``; integrals ``1/(n+1)`` go to 0."""
    return SequenceSpec(
        "x^n",
        lambda n: function(Pow(X, Fraction(n)), UNIT, True),
        tuple(1 << k for k in range(13)),
        limit_integral=Fraction(0),
    )


def _indicator(lo, hi) -> FunctionRep:
    core = Piecewise(((Box((Fraction(lo),), (Fraction(hi),)), Const(Fraction(1))),), Const(Fraction(0)))
    return function(core, UNIT, True)


def alternating_halves() -> SequenceSpec:
    """Indicators of (0,1/2) and (1/2,1) in turn: liminf is 0 a.e., each integral is 1/2."""
    return SequenceSpec(
        "alternating indicators of (0,1/2) and (1/2,1)",
        lambda n: _indicator(0, Fraction(1, 2)) if n % 2 else _indicator(Fraction(1, 2), 1),
        tuple(range(1, 9)),
        limit_integral=None,
        liminf=function(Const(Fraction(0)), UNIT, True),
        period=2,
    )


def constant_sequence(c=Fraction(1, 2)) -> SequenceSpec:
    c = Fraction(c)
    return SequenceSpec(
        f"constant {c}",
        lambda n: function(Const(c), UNIT, True),
        tuple(range(1, 5)),
        monotone=True,
        limit_integral=c,
        liminf=function(Const(c), UNIT, True),
        period=1,
    )


def _sample_points(f: FunctionRep, count: int = 1000) -> list[tuple]:
    box = f.domain.boxes[0]
    d = box.dim
    per = max(2, round(count ** (1 / d)))
    pts = []
    for idx in np.ndindex(*([per] * d)):
        pts.append(tuple(box.lo[j] + (box.hi[j] - box.lo[j]) * Fraction(2 * i + 1, 2 * per)
                         for j, i in enumerate(idx)))
    return pts


def check_monotone(spec: SequenceSpec, count: int = 1000) -> bool:
    terms = [spec.term(n) for n in spec.indices]
    pts = _sample_points(terms[0], count)
    for a, b in zip(terms, terms[1:]):
        for p in pts:
            if eval_point(a, p) > eval_point(b, p):
                return False
    return True


# -- step approximation ---------------------------------------------------------------


def step_approx(f: FunctionRep, n: int, budget: int = 1 << 14) -> FunctionRep:
    """Ladder minorant ``phi_n`` with values ``k / 2^n`` capped at ``n``.

    Cells whose range enclosure stays inside one ladder interval get the
    exact ladder value; undecided cells at the end of the budget get the
    ladder value of their lower bound, which keeps ``phi_n <= f``.
    """
    if len(f.domain) != 1:
        raise ValueError("step_approx works on a single domain box")
    box = f.domain.boxes[0]
    scale = Fraction(1 << n)
    cap = float(n)

    def ladder(v):
        v = np.minimum(np.maximum(v, 0.0), cap)
        return np.floor(v * float(scale)) / float(scale)

    bases = Bases([box])
    cells = Cells.initial(1, box.dim, 0)
    done_cells: list = []
    done_vals: list = []
    evaluated = 0
    while True:
        lo, hi = cells.bounds(bases)
        flo, fhi, _ = evaluate(f.core, lo, hi)
        evaluated += len(cells)
        a, b = ladder(flo), ladder(fhi)
        decided = (a == b) | (flo >= cap)
        undecided = ~decided
        stop = evaluated + 2 * int(undecided.sum()) > budget or not cells.take(undecided).splittable().any()
        keep = decided if not stop else np.ones(len(cells), bool)
        done_cells.append(cells.take(keep))
        done_vals.append(a[keep])
        if stop or not undecided.any():
            break
        rest = cells.take(undecided)
        left, right = rest.children(rest.split_axis(bases))
        cells = Cells(np.concatenate([left.base, right.base]),
                      np.concatenate([left.lev, right.lev]),
                      np.concatenate([left.k, right.k]))
    by_value: dict = {}
    for c, vals in zip(done_cells, done_vals):
        for bx, v in zip(c.boxes(bases), vals.tolist()):
            if v > 0:
                by_value.setdefault(Fraction(v), []).append(bx)
    pieces = []
    for v in sorted(by_value):
        for bx in union_normalize(by_value[v], box.dim):
            pieces.append((bx, Const(v)))
    return function(Piecewise(tuple(pieces), Const(Fraction(0))), f.domain, True)


def step_approx_check(f: FunctionRep, ns=(1, 2, 3, 4), eps=Fraction(1, 10**4)) -> CheckReport:
    """Ladder integrals stay below the integral of ``f`` and report the L1 gap."""
    integral = mimura_integrate(f, eps=eps)
    rows = []
    ok = True
    for n in ns:
        phi = step_approx(f, n)
        v = step_integral(phi.core, f.domain)
        ok &= v <= integral.upper
        rows.append({"n": n, "step_integral": v, "l1_gap_upper": integral.upper - v})
    return CheckReport("step-approx", PASS if ok else FAIL, {"integral": _enc(integral), "ladder": rows})


# -- layer cake ---------------------------------------------------------------------


def _ceiling(f: FunctionRep, box: Box) -> Fraction:
    if isinstance(f.core, Const):
        return max(f.core.value, Fraction(0))
    if is_step(f.core):
        vals = [e.value for _, e in f.core.pieces] + [f.core.default.value]
        return max(max(vals), Fraction(0))
    s = ess_sup(f, box, Fraction(1, 1 << 10))
    if s.hi == INF:
        raise ValueError("no finite essential supremum: the layer-cake grid needs a ceiling")
    grid = Fraction(1, 1 << 10)
    return max(-((-s.hi) // grid) * grid, Fraction(0))


def layer_cake(f: FunctionRep, box: Box | None = None, steps: int = 4096, budget: int = 1 << 16):
    """Enclosure of the integral over ``t`` of ``mu({f > t})`` on a dyadic grid.

    ``t`` above the ceiling (an upper bound of the essential supremum)
    contributes nothing, so the grid stops there.
    """
    box = box if box is not None else f.domain.boxes[0]
    top = _ceiling(f, box)
    if top == 0:
        return IntegralEnclosure(Fraction(0), Fraction(0), True, [], 0, Fraction(0), "layer-cake")
    dt = top / steps
    ts = [k * dt for k in range(steps + 1)]
    prof = level_set_profile(f, box, ts, budget)
    lower = sum((prof[k + 1][0] for k in range(steps)), Fraction(0)) * dt
    upper = sum((prof[k][1] for k in range(steps)), Fraction(0)) * dt
    return IntegralEnclosure(lower, upper, True, [], len(ts), Fraction(0), "layer-cake")


def layer_cake_check(f: FunctionRep, box: Box | None = None, eps=Fraction(1, 10**3),
                     name: str = "layer-cake") -> CheckReport:
    eps = Fraction(eps)
    box = box if box is not None else f.domain.boxes[0]
    lc = layer_cake(f, box)
    integral = mimura_integrate(f, box, eps / 8)
    ok = agree(lc, integral, eps)
    return CheckReport(name, PASS if ok else UNDECIDED,
                       {"layer_cake": _enc(lc), "integral": _enc(integral), "tolerance": eps})


# -- convergence theorems -------------------------------------------------------------


def _integrals(spec: SequenceSpec, eps) -> list[IntegralEnclosure]:
    return [integrate_signed(spec.term(n), eps=eps) for n in spec.indices]


def mct_check(spec: SequenceSpec, eps=Fraction(1, 100)) -> CheckReport:
    """Increasing sequence: integrals increase towards the integral of the limit."""
    eps = Fraction(eps)
    if not check_monotone(spec):
        raise ValueError(f"{spec.name}: not increasing on the sample grid")
    encs = _integrals(spec, eps / 4)
    increasing = all(a.lower <= b.upper for a, b in zip(encs, encs[1:]))
    dist = _distance(spec.limit_integral, encs[-1])
    ok = increasing and dist <= eps
    return CheckReport(f"mct:{spec.name}", PASS if ok else FAIL, {
        "sequence": spec.name,
        "indices": list(spec.indices),
        "integrals": [_enc(e) for e in encs],
        "limit": spec.limit_integral,
        "distance": dist,
        "increasing": increasing,
        "tolerance": eps,
    })


def dct_check(spec: SequenceSpec, majorant: FunctionRep, eps=Fraction(1, 10**3)) -> CheckReport:
    """Dominated sequence: integrals approach the integral of the limit."""
    eps = Fraction(eps)
    certified = True
    for n in spec.indices:
        fn = spec.term(n)
        gap = function(Sub(majorant.core, Abs(fn.core)), fn.domain)
        if not certify_nonnegative(gap):
            certified = False
            pts = _sample_points(fn, 200)
            if any(abs(eval_point(fn, p)) > eval_point(majorant, p) for p in pts):
                raise ValueError(f"{spec.name}: majorant violated at n={n}")
    bound = mimura_integrate(majorant, eps=eps)
    encs = _integrals(spec, eps / 8)
    dist = _distance(spec.limit_integral, encs[-1])
    ok = dist <= eps and bound.upper != INF
    return CheckReport(f"dct:{spec.name}", PASS if ok else FAIL, {
        "sequence": spec.name,
        "indices": list(spec.indices),
        "integrals": [_enc(e) for e in encs],
        "majorant_integral": _enc(bound),
        "domination_certified": certified,
        "limit": spec.limit_integral,
        "distance": dist,
        "tolerance": eps,
    })


def fatou_check(spec: SequenceSpec, eps=Fraction(1, 10**3), margin=None) -> CheckReport:
    """Integral of the liminf against the liminf of the integrals.

    The inequality is checked, never equality; with ``margin`` the certified
    gap must be at least that large.
    """
    eps = Fraction(eps)
    encs = _integrals(spec, eps / 4)
    tail = encs[-spec.period:]
    li_lower = min(e.lower for e in tail)
    li_upper = min(e.upper for e in tail)
    liminf_int = integrate_signed(spec.liminf, eps=eps / 4)
    holds = liminf_int.lower <= li_upper
    gap = li_lower - liminf_int.upper
    ok = holds and (margin is None or gap >= Fraction(margin))
    return CheckReport(f"fatou:{spec.name}", PASS if ok else FAIL, {
        "sequence": spec.name,
        "integrals": [_enc(e) for e in encs],
        "liminf_of_integrals": [li_lower, li_upper],
        "integral_of_liminf": _enc(liminf_int),
        "certified_gap": gap,
        "margin": margin,
    })


# -- Tonelli / Fubini ---------------------------------------------------------------


def _breakpoints(pieces, box: Box, axis: int) -> list:
    pts = {box.lo[axis], box.hi[axis]}
    for b, _ in pieces:
        for v in (b.lo[axis], b.hi[axis]):
            if box.lo[axis] < v < box.hi[axis]:
                pts.add(v)
    return sorted(pts)


def _section(core: Piecewise, point: dict, inner_axes: tuple) -> Piecewise:
    """Restrict a step function to the slice where the outer axes are fixed."""
    pieces = []
    for b, e in core.pieces:
        if all(b.lo[a] < v < b.hi[a] for a, v in point.items()):
            pieces.append((b.project(inner_axes), e))
    return Piecewise(tuple(pieces), core.default)


def iterated_step_integral(core: Expr, box: Box, outer_axes: tuple) -> Fraction:
    """Exact iterated integral: inner over the other axes, outer over ``outer_axes``."""
    d = box.dim
    inner_axes = tuple(a for a in range(d) if a not in outer_axes)
    if isinstance(core, Const):
        return core.value * _measure(box)
    grids = [_breakpoints(core.pieces, box, a) for a in outer_axes]
    inner_box = box.project(inner_axes)
    total = Fraction(0)
    for cell in _grid_cells(grids):
        point = {a: (lo + hi) / 2 for a, (lo, hi) in zip(outer_axes, cell)}
        sec = _section(core, point, inner_axes)
        inner = step_integral(sec, BoxUnion([inner_box], len(inner_axes)))
        width = Fraction(1)
        for lo, hi in cell:
            width *= hi - lo
        total += width * inner
    return total


def _measure(b: Box) -> Fraction:
    out = Fraction(1)
    for w in b.widths():
        out *= w
    return out


def _grid_cells(grids):
    if not grids:
        yield ()
        return
    first, rest = grids[0], grids[1:]
    for lo, hi in zip(first, first[1:]):
        for tail in _grid_cells(rest):
            yield ((lo, hi),) + tail


def _interval_mul(a: tuple, b: tuple) -> tuple:
    ps = [x * y for x in a for y in b]
    return min(ps), max(ps)


def tonelli_check(f: FunctionRep, split: int = 1, eps=Fraction(1, 10**4), signed: bool = False,
                  name: str | None = None) -> CheckReport:
    """Product integral against both iterated integrals on a product box.

    The first ``split`` axes form one factor space and the rest the other.
    Step functions are compared exactly; separable products ``g(x) h(y)``
    are compared through independent one-factor enclosures.
    """
    eps = Fraction(eps)
    name = name or ("fubini" if signed else "tonelli")
    if len(f.domain) != 1:
        raise ValueError("product checks need a single domain box")
    box = f.domain.boxes[0]
    d = box.dim
    xs, ys = tuple(range(split)), tuple(range(split, d))
    if not xs or not ys:
        raise ValueError("split must leave both factor spaces nonempty")
    if is_step(f.core):
        whole = step_integral(f.core, f.domain)
        xy = iterated_step_integral(f.core, box, xs)
        yx = iterated_step_integral(f.core, box, ys)
        ok = whole == xy == yx
        return CheckReport(name, PASS if ok else FAIL, {
            "function": str(f.core), "product": whole, "inner_y_outer_x": xy,
            "inner_x_outer_y": yx, "exact": True,
        })
    groups = separable_groups(f.core)
    if groups is None:
        raise ValueError("only step functions and separable products can be checked")
    scalar, parts = groups
    gx = [(e, cs) for e, cs in parts if set(cs) <= set(xs)]
    gy = [(e, cs) for e, cs in parts if set(cs) <= set(ys)]
    if len(gx) + len(gy) != len(parts):
        raise ValueError("a factor couples both factor spaces")

    def factor(groups_, axes):
        core = Const(Fraction(1))
        for e, _ in groups_:
            core = Mul(core, e)
        sub = core.reindex({a: i for i, a in enumerate(axes)})
        return function(sub, box.project(axes))

    fx, fy = factor(gx, xs), factor(gy, ys)

    def one(g, tol):
        e = integrate_signed(g, eps=tol)
        return (e.lower, e.upper)

    if signed:
        whole_e = None
    else:
        whole_e = mimura_integrate(f, eps=eps / 2)
    # inner over y then outer over x, and the other way round, with different tolerances
    iy, ix = one(fy, eps / 16), one(fx, eps / 8)
    xy = _interval_mul((scalar, scalar), _interval_mul(ix, iy))
    jx, jy = one(fx, eps / 16), one(fy, eps / 8)
    yx = _interval_mul((scalar, scalar), _interval_mul(jy, jx))
    if whole_e is None:
        whole = _interval_mul((scalar, scalar), _interval_mul(one(fx, eps / 32), one(fy, eps / 32)))
    else:
        whole = (whole_e.lower, whole_e.upper)
    encs = [whole, xy, yx]
    lo = max(e[0] for e in encs)
    hi = min(e[1] for e in encs)
    hull = max(e[1] for e in encs) - min(e[0] for e in encs)
    ok = lo <= hi and hull <= eps
    return CheckReport(name, PASS if ok else UNDECIDED, {
        "function": str(f.core), "product": list(whole), "inner_y_outer_x": list(xy),
        "inner_x_outer_y": list(yx), "hull_width": hull, "tolerance": eps, "exact": False,
    })


def fubini_check(f: FunctionRep, split: int = 1, eps=Fraction(1, 10**4)) -> CheckReport:
    return tonelli_check(f, split, eps, signed=True)


# -- Riemann comparison -------------------------------------------------------------


@dataclass(frozen=True)
class DarbouxSums:
    lower: tuple  # enclosure of the lower Darboux sum
    upper: tuple  # enclosure of the upper Darboux sum


def darboux_sums(f: FunctionRep, box: Box, n: int, sub: int | None = None) -> DarbouxSums:
    """Enclosures of the Darboux sums on the uniform grid of mesh ``2^-n``.

    Each grid cell is cut into ``2^sub`` pieces per axis: the least interval
    lower bound bounds the cell infimum from below and the least midpoint
    value bounds it from above (dually for the supremum).
    """
    d = box.dim
    if sub is None:
        sub = max(1, (20 // d) - n)
    per_cell = 1 << (sub * d)
    # grid cells of the box at mesh 2^-n are aligned with the fine grid
    widths = box.widths()
    levels = []
    for w in widths:
        lv = 0
        while Fraction(1, 1 << n) * (1 << lv) < w:
            lv += 1
        if Fraction(1, 1 << n) * (1 << lv) != w:
            raise ValueError("box widths must be 2^k multiples of the mesh")
        levels.append(lv)
    bases = Bases([box])
    fine = [lv + sub for lv in levels]
    idx = np.indices([1 << f_ for f_ in fine], dtype=np.int64).reshape(d, -1).T.copy()
    cells = Cells(np.zeros(len(idx), dtype=np.int64), np.tile(np.array(fine, dtype=np.int64), (len(idx), 1)), idx)
    lo, hi = cells.bounds(bases)
    flo, fhi, offenders = evaluate(f.core, lo, hi)
    if offenders:
        raise ValueError("function not evaluable on the grid")
    mid = (lo + hi) / 2
    mlo, mhi, _ = evaluate(f.core, mid, mid)
    coarse = idx >> sub
    key = np.zeros(len(idx), dtype=np.int64)
    for j in range(d):
        key = key * (1 << levels[j]) + coarse[:, j]
    order = np.argsort(key, kind="stable")
    key = key[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    inf_lo = np.minimum.reduceat(flo[order], starts)
    inf_hi = np.minimum.reduceat(mhi[order], starts)
    sup_lo = np.maximum.reduceat(mlo[order], starts)
    sup_hi = np.maximum.reduceat(fhi[order], starts)
    assert len(starts) * per_cell == len(idx)
    e = np.full(len(starts), int(bases.exp2[0]) - sum(levels), dtype=np.int64)
    g = np.zeros(len(starts), dtype=np.int64)

    def total(v):
        return grouped_exact_sum(v, e, g, bases.factors)

    return DarbouxSums((total(inf_lo), total(inf_hi)), (total(sup_lo), total(sup_hi)))


def riemann_compare(f: FunctionRep, box: Box | None = None, n: int = 10, eps=Fraction(1, 10**6),
                    name: str = "riemann") -> CheckReport:
    """Darboux sums at mesh ``2^-n`` must bracket the partition enclosure."""
    box = box if box is not None else f.domain.boxes[0]
    dx = darboux_sums(f, box, n)
    m = integrate_signed(f, box, eps)
    w = m.upper - m.lower
    left = dx.lower[1] <= m.lower + w
    right = m.upper <= dx.upper[0] + w
    return CheckReport(name, PASS if left and right else FAIL, {
        "function": str(f.core), "mesh_exponent": n, "darboux_lower": list(dx.lower),
        "mimura": _enc(m), "darboux_upper": list(dx.upper),
    })


# -- fixtures and the suite -----------------------------------------------------------


def riemann_fixtures() -> list[tuple[str, FunctionRep, Box]]:
    two = Box((0,), (2,))
    return [
        ("x^2", function(Pow(X, Fraction(2)), UNIT, True), UNIT),
        ("sin(x)", function(sin(X), UNIT, True), UNIT),
        ("exp(x)", function(exp(X), UNIT, True), UNIT),
        ("x*(1-x)", function(Mul(X, Sub(Const(Fraction(1)), X)), UNIT, True), UNIT),
        ("1+cos(3x)", function(Const(Fraction(1)) + cos(Const(Fraction(3)) * X), two, True), two),
    ]


def tonelli_step_fixture() -> FunctionRep:
    """``2 * 1_{(0,1/2)x(0,1)} + 1_{(1/2,1)x(0,1/2)}``; every route gives 5/4."""
    h = Fraction(1, 2)
    core = Piecewise((
        (Box((0, 0), (h, 1)), Const(Fraction(2))),
        (Box((h, 0), (1, h)), Const(Fraction(1))),
    ), Const(Fraction(0)))
    return function(core, Box.unit(2), True)


def signed_step_fixture() -> FunctionRep:
    h = Fraction(1, 2)
    core = Piecewise((
        (Box((0, 0), (h, h)), Const(Fraction(3))),
        (Box((h, 0), (1, 1)), Const(Fraction(-1))),
    ), Const(Fraction(1, 4)))
    return function(core, Box.unit(2))


def load_caratheodory_fixtures(path=None) -> list[dict]:
    if path is None:
        text = resources.files("partint").joinpath("data/caratheodory_fixtures.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return json.loads(text)["pairs"]


def caratheodory_suite(path=None) -> list[CheckReport]:
    from .parser import parse_set

    out = []
    for i, pair in enumerate(load_caratheodory_fixtures(path)):
        e = parse_set(pair["E"])
        tests = [parse_set(a) for a in pair["A"]]
        plain = caratheodory_check(e, tests)
        mod = caratheodory_check(parse_set(f"nullmod({pair['E']}, rationals)"), tests)
        verdicts = [r.verdict for r in plain]
        same = verdicts == [r.verdict for r in mod]
        ok = same and all(v == PASS_EXACT for v in verdicts)
        out.append(CheckReport(f"caratheodory[{i}]", PASS if ok else FAIL, {
            "E": pair["E"], "verdicts": verdicts, "null_modified_identical": same,
            "measures": [[r.test_set, r.with_set, r.without_set] for r in plain],
        }))
    return out


SUITES = ("mct", "fatou", "dct", "tonelli", "layercake", "riemann", "subgraph", "caratheodory")


def run_suite(name: str = "all", eps=None, fixtures=None) -> list[CheckReport]:
    """Run one named suite (or all of them) on the shipped fixtures."""
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, eps, fixtures))
        return out
    if name == "mct":
        return [mct_check(sqrt_truncation(), eps or Fraction(1, 100)),
                mct_check(scaled_constant(), eps or Fraction(1, 100)),
                mct_check(square_truncation(), eps or Fraction(1, 100))]
    if name == "dct":
        one = function(Const(Fraction(1)), UNIT, True)
        return [dct_check(powers(), one, eps or Fraction(1, 10**3))]
    if name == "fatou":
        return [fatou_check(alternating_halves(), eps or Fraction(1, 10**3), margin=Fraction(1, 4)),
                fatou_check(constant_sequence(), eps or Fraction(1, 10**3))]
    if name == "tonelli":
        y = Coord(1)
        square = function(Const(Fraction(1)), Box.unit(2), True)
        return [
            tonelli_check(square, name="tonelli-square"),
            tonelli_check(tonelli_step_fixture(), name="tonelli-step"),
            tonelli_check(function(Mul(X, y), Box.unit(2), True), eps=eps or Fraction(1, 10**4),
                          name="tonelli-xy"),
            fubini_check(signed_step_fixture()),
            tonelli_check(function(Mul(Sub(X, Const(Fraction(1, 2))), y), Box.unit(2)),
                          eps=eps or Fraction(1, 10**4), signed=True, name="fubini-separable"),
        ]
    if name == "layercake":
        return [
            layer_cake_check(function(X, UNIT, True), eps=eps or Fraction(1, 10**3), name="layercake-x"),
            layer_cake_check(function(Const(Fraction(3, 4)), UNIT, True), eps=eps or Fraction(1, 10**3),
                             name="layercake-const"),
            layer_cake_check(_dirichlet(), eps=eps or Fraction(1, 10**3), name="layercake-dirichlet"),
        ]
    if name == "riemann":
        return [riemann_compare(f, b, 10, eps or Fraction(1, 10**5), name=f"riemann-{label}")
                for label, f, b in riemann_fixtures()]
    if name == "subgraph":
        out = []
        for label, core in (("const", Const(Fraction(3, 4))), ("x", X), ("x^2", Pow(X, Fraction(2)))):
            r = subgraph_measure_check(function(core, UNIT, True), UNIT, eps or Fraction(1, 10**3))
            out.append(CheckReport(f"subgraph-{label}", r.status, {
                "subgraph_measure": [r.left.lower, r.left.upper], "integral": _enc(r.right),
                "tolerance": r.tolerance,
            }))
        return out
    if name == "caratheodory":
        return caratheodory_suite(fixtures)
    raise ValueError(f"unknown suite {name!r}")


def _dirichlet() -> FunctionRep:
    from .funcrep import dirichlet

    return dirichlet()


def suite_report(checks: list[CheckReport], suite: str) -> dict:
    counts = {s: sum(c.status == s for c in checks) for s in (PASS, UNDECIDED, FAIL)}
    return {
        "schema": "mimura-trace/1",
        "suite": suite,
        "checks": [c.to_json() for c in checks],
        "summary": counts,
    }
