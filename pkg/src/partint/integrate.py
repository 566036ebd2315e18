"""Lower/upper partition sums and the adaptive enclosure engine.

The engine keeps a finite partition of each domain box into affine-dyadic
subcells (cell ``k`` at per-axis level ``l`` of base box ``B`` is
``B.lo + B.width * [k, k+1] / 2**l``) and repeatedly bisects the cells that
contribute most to ``U - L``.  All sums are exact rationals; only the
per-cell bounds come from outward-rounded float interval arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .expr import Const, DomainError, Expr, Mul, Piecewise, evaluate, factors
from .funcrep import (
    FunctionRep,
    NotNonnegative,
    certify_nonnegative,
    function,
    pos_neg_split,
    range_enclosure,
    ess_inf,
    ess_sup,
)
from .geometry import (
    INF,
    Box,
    BoxUnion,
    box_measure,
    difference,
    intersect,
    union_normalize,
)
from .cells import Bases, Cells, grouped_exact_sum, interleave
from .partition import Partition


class NotIntegrable(ArithmeticError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    cells: int
    lower: object
    upper: object

    @property
    def gap(self):
        return self.upper - self.lower


@dataclass(frozen=True)
class SumReport:
    partition: Partition
    lower: object
    upper: object
    per_cell: tuple  # (alpha, beta, measure) per cell
    remainder_term: object = Fraction(0)

    @property
    def gap(self):
        return self.upper - self.lower


@dataclass
class IntegralEnclosure:
    lower: object
    upper: object
    converged: bool
    trace: list = field(default_factory=list)
    cells: int = 0
    remainder: object = Fraction(0)
    method: str = "adaptive"

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, v) -> bool:
        return self.lower <= v <= self.upper

    def __neg__(self):
        return IntegralEnclosure(-self.upper, -self.lower, self.converged, self.trace, self.cells,
                                 self.remainder, self.method)


def agree(a, b, tol) -> bool:
    """Both enclosures overlap and their hull is at most ``tol`` wide."""
    lo = max(a.lower, b.lower)
    hi = min(a.upper, b.upper)
    return lo <= hi and max(a.upper, b.upper) - min(a.lower, b.lower) <= tol


# -- sums over an explicit partition ---------------------------------------------


def _require_nonnegative(f: FunctionRep):
    if f.nonnegative:
        return
    if not certify_nonnegative(f):
        raise NotNonnegative("function is not certified nonnegative; use integrate_signed")


def _cell_extrema(f: FunctionRep, cells, tol=None):
    out = []
    for c in cells:
        if tol is None:
            r = range_enclosure(f, c)
            a, b = r.lo, r.hi
        else:
            a, b = ess_inf(f, c, tol).lo, ess_sup(f, c, tol).hi
        out.append((max(a, Fraction(0)), b))
    return out


def _remainder_term(f: FunctionRep, p: Partition):
    if p.remainder is None or p.remainder.bound == 0:
        return Fraction(0)
    # remainder cubes may stick out of the target; only the part inside matters
    pieces = [intersect(r, t) for r in p.remainder.region for t in p.target]
    pieces = [b for b in pieces if not b.is_empty]
    if not pieces:
        return Fraction(0)
    sup = max(range_enclosure(f, b).hi for b in pieces)
    if sup == INF:
        return INF
    return p.remainder.bound * max(sup, Fraction(0))


def sum_report(f: FunctionRep, p: Partition, tol=None) -> SumReport:
    _require_nonnegative(f)
    ext = _cell_extrema(f, p.cells, tol)
    per_cell = tuple((a, b, box_measure(c)) for (a, b), c in zip(ext, p.cells))
    lower = sum((a * m for a, _, m in per_cell), Fraction(0))
    upper = Fraction(0)
    for _, b, m in per_cell:
        if m == 0:
            continue
        if b == INF:
            upper = INF
            break
        upper += b * m
    rem = _remainder_term(f, p)
    if upper != INF:
        upper = upper + rem if rem != INF else INF
    return SumReport(p, lower, upper, per_cell, rem)


def lower_sum(f: FunctionRep, p: Partition, tol=None):
    return sum_report(f, p, tol).lower


def upper_sum(f: FunctionRep, p: Partition, tol=None):
    """Certified upper sum; ``inf`` signals an infinite upper sum."""
    return sum_report(f, p, tol).upper


# -- the adaptive engine -----------------------------------------------------------


@dataclass
class _Run:
    lower: object
    upper: object
    converged: bool
    trace: list
    cells: int


def _evaluate_cells(core: Expr, cells: Cells, bases: Bases):
    lo, hi = cells.bounds(bases)
    flo, fhi, offenders = evaluate(core, lo, hi)
    if offenders:
        node, _ = offenders[0]
        raise DomainError(f"domain violation at node {node}", node)
    return flo, fhi


def _refine(core: Expr, boxes, eps, budget: int, scale: int = 0, on_epoch: Callable | None = None) -> _Run:
    """Greedy bisection of the cells with the largest ``(beta - alpha)|I|``.

    ``core`` must be nonnegative on the boxes: lower bounds are clamped at 0
    and every child inherits its parent's bounds where they are tighter, so
    the lower sum never decreases and the upper sum never increases.
    """
    eps = Fraction(eps)
    bases = Bases(boxes)
    cells = Cells.initial(len(bases), bases.dim, scale)
    flo, fhi = _evaluate_cells(core, cells, bases)
    alpha = np.maximum(flo, 0.0)
    beta = np.maximum(fhi, alpha)

    def contrib(c: Cells, vals):
        e = c.log2_measure(bases)
        g = bases.group[c.base]
        return grouped_exact_sum(vals, e, g, bases.factors)

    def upper_parts(c: Cells, vals):
        inf = np.isinf(vals)
        return int(inf.sum()), contrib(c.take(~inf), vals[~inf])

    lower = contrib(cells, alpha)
    n_inf, upper_fin = upper_parts(cells, beta)
    trace: list[TraceEntry] = []
    converged = False
    iteration = 0
    while True:
        upper = INF if n_inf else upper_fin
        entry = TraceEntry(iteration, len(cells), lower, upper)
        trace.append(entry)
        if on_epoch is not None:
            on_epoch(entry)
        if upper != INF and upper - lower < eps:
            converged = True
            break
        room = budget - len(cells)
        if room <= 0:
            break
        e = cells.log2_measure(bases)
        with np.errstate(invalid="ignore", over="ignore"):
            score = np.ldexp(beta - alpha, e) * bases.factor_float[bases.group[cells.base]]
        score = np.where(cells.splittable(), score, -1.0)
        top = score.max()
        if not top > 0:
            break
        if np.isinf(top):
            sel = np.isinf(score)
        else:
            sel = score >= top / 2
        idx = np.flatnonzero(sel)
        if len(idx) > room:
            order = np.argsort(-score[idx], kind="stable")[:room]
            idx = np.sort(idx[order])
            sel = np.zeros(len(cells), bool)
            sel[idx] = True
        parent = cells.take(idx)
        axis = parent.split_axis(bases)
        left, right = parent.children(axis)
        both = Cells(np.concatenate([left.base, right.base]),
                     np.concatenate([left.lev, right.lev]),
                     np.concatenate([left.k, right.k]))
        clo, chi = _evaluate_cells(core, both, bases)
        pa = np.concatenate([alpha[idx], alpha[idx]])
        pb = np.concatenate([beta[idx], beta[idx]])
        ca = np.maximum(np.maximum(clo, 0.0), pa)
        cb = np.maximum(np.minimum(chi, pb), ca)
        lower = lower - contrib(parent, alpha[idx]) + contrib(both, ca)
        pinf, pfin = upper_parts(parent, beta[idx])
        cinf, cfin = upper_parts(both, cb)
        n_inf += cinf - pinf
        upper_fin = upper_fin - pfin + cfin
        m = len(idx)
        cells, alpha, beta = interleave(
            cells, sel, left, right,
            (alpha, ca[:m], ca[m:]),
            (beta, cb[:m], cb[m:]),
        )
        iteration += 1
    upper = INF if n_inf else upper_fin
    return _Run(lower, upper, converged, trace, len(cells))


# -- exact paths -------------------------------------------------------------------


def step_integral(core: Expr, domain: BoxUnion) -> Fraction:
    """Exact integral of a constant or step core; earlier pieces win on overlaps."""
    if isinstance(core, Const):
        return core.value * domain.measure()
    if not (isinstance(core, Piecewise) and core.is_step):
        raise TypeError("not a step function")
    remaining = domain
    total = Fraction(0)
    for box, e in core.pieces:
        piece = BoxUnion([box], domain.dim)
        inside = union_normalize([intersect(a, box) for a in remaining], domain.dim)
        total += e.value * inside.measure()
        remaining = difference(remaining, piece)
    return total + core.default.value * remaining.measure()


def is_step(core: Expr) -> bool:
    return isinstance(core, Const) or (isinstance(core, Piecewise) and core.is_step)


def _exact_enclosure(value: Fraction, domain: BoxUnion) -> IntegralEnclosure:
    trace = [TraceEntry(0, len(domain), value, value)]
    return IntegralEnclosure(value, value, True, trace, len(domain), Fraction(0), "exact")


# -- separable products ----------------------------------------------------------


def separable_groups(core: Expr):
    """Split a product into factor groups over disjoint coordinate sets.

    Returns ``(scalar, [(expr, coords), ...])`` or ``None`` when the core is
    not a product of at least two independent groups.
    """
    fs = factors(core)
    if len(fs) < 2:
        return None
    scalar = Fraction(1)
    groups: list[tuple[list, set]] = []
    for f in fs:
        cs = set(f.coords())
        if not cs:
            if not isinstance(f, Const):
                return None
            scalar *= f.value
            continue
        merged = [g for g in groups if g[1] & cs]
        rest = [g for g in groups if not (g[1] & cs)]
        exprs = [f]
        for g in merged:
            exprs = g[0] + exprs
            cs |= g[1]
        groups = rest + [(exprs, cs)]
    if len(groups) < 2:
        return None
    out = []
    for exprs, cs in sorted(groups, key=lambda g: min(g[1])):
        e = exprs[0]
        for x in exprs[1:]:
            e = Mul(e, x)
        out.append((e, tuple(sorted(cs))))
    return scalar, out


def _separable(core: Expr, box: Box, eps: Fraction, budget: int, scale: int):
    split = separable_groups(core)
    if split is None:
        return None
    scalar, groups = split
    if scalar < 0:
        return None
    parts = []
    for e, cs in groups:
        sub = e.reindex({c: i for i, c in enumerate(cs)})
        pbox = box.project(cs)
        if not certify_nonnegative(function(sub, pbox)):
            return None
        parts.append((sub, pbox))
    m = len(parts)
    tols = [eps / (2 * m)] * m
    trace = []
    for attempt in range(12):
        runs = [_refine(sub, [pbox], tol, budget, scale) for (sub, pbox), tol in zip(parts, tols)]
        lo = scalar * _prod(r.lower for r in runs)
        ups = [r.upper for r in runs]
        if any(u == INF for u in ups):
            return None
        hi = scalar * _prod(ups)
        cells = 1
        for r in runs:
            cells *= r.cells
        trace.append(TraceEntry(attempt, cells, lo, hi))
        if hi - lo < eps:
            return IntegralEnclosure(lo, hi, True, trace, cells, Fraction(0), "separable")
        if not all(r.converged for r in runs):
            return IntegralEnclosure(lo, hi, False, trace, cells, Fraction(0), "separable")
        # width <= sum_k w_k * prod_{j != k} U_j; aim each term at eps / (2m)
        new = []
        for i in range(m):
            others = scalar * _prod(ups[j] for j in range(m) if j != i)
            t = eps / (2 * m * max(others, Fraction(1)))
            new.append(min(tols[i] / 2, t))
        tols = new
    return IntegralEnclosure(lo, hi, False, trace, cells, Fraction(0), "separable")


def _prod(it):
    out = Fraction(1)
    for v in it:
        out *= v
    return out


# -- public entry points ---------------------------------------------------------


def _as_domain(f: FunctionRep, domain) -> BoxUnion:
    if domain is None:
        return f.domain
    if isinstance(domain, Box):
        return BoxUnion([domain], domain.dim)
    if isinstance(domain, BoxUnion):
        return domain
    return union_normalize(list(domain))


def _window_box(window, dim: int) -> Box:
    if isinstance(window, Box):
        return window
    n = Fraction(window)
    return Box((-n,) * dim, (n,) * dim)


def mimura_integrate(
    f: FunctionRep,
    domain=None,
    eps=Fraction(1, 10**6),
    budget: int = 1 << 21,
    scale: int = 0,
    window=None,
    tail_bound=None,
    separable: bool = True,
    on_epoch: Callable | None = None,
) -> IntegralEnclosure:
    """Certified enclosure of the integral of a nonnegative ``f`` over ``domain``.

    Unbounded domain boxes are cut to ``window`` (a Box or a half-width
    ``n`` for ``(-n, n)^d``).  The part outside the window is unknown unless
    ``tail_bound`` bounds its integral (e.g. from an integrable majorant), so
    without it the upper end is ``inf`` and the result unconverged.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    dom = _as_domain(f, domain)
    if dom.dim != f.dim:
        raise ValueError("domain dimension does not match the function")
    tail = Fraction(0)
    if any(not b.is_bounded for b in dom):
        if window is None:
            raise ValueError("unbounded domain: supply an exhaustion window")
        w = _window_box(window, dom.dim)
        dom = union_normalize([intersect(b, w) for b in dom], dom.dim)
        tail = INF if tail_bound is None else Fraction(tail_bound)
    dom = union_normalize(list(dom), dom.dim)
    if dom.is_empty:
        enc = _exact_enclosure(Fraction(0), dom)
        return _with_tail(enc, tail)
    _require_nonnegative(f)
    if is_step(f.core):
        enc = _exact_enclosure(step_integral(f.core, dom), dom)
        if on_epoch is not None:
            on_epoch(enc.trace[0])
        return _with_tail(enc, tail)
    if separable and len(dom) == 1:
        enc = _separable(f.core, dom.boxes[0], eps, budget, scale)
        if enc is not None:
            if on_epoch is not None:
                for t in enc.trace:
                    on_epoch(t)
            return _with_tail(enc, tail)
    run = _refine(f.core, list(dom), eps, budget, scale, on_epoch)
    enc = IntegralEnclosure(run.lower, run.upper, run.converged, run.trace, run.cells)
    return _with_tail(enc, tail)


def _with_tail(enc: IntegralEnclosure, tail) -> IntegralEnclosure:
    if tail == 0:
        return enc
    upper = INF if tail == INF or enc.upper == INF else enc.upper + tail
    converged = enc.converged and tail != INF and upper - enc.lower < INF
    return IntegralEnclosure(enc.lower, upper, converged and tail != INF, enc.trace, enc.cells, tail, enc.method)


def integrate_signed(f: FunctionRep, domain=None, eps=Fraction(1, 10**6), budget: int = 1 << 21,
                     **kw) -> IntegralEnclosure:
    """Enclosure of ``int f+ - int f-``, each half computed to ``eps / 2``."""
    eps = Fraction(eps)
    dom = _as_domain(f, domain)
    if is_step(f.core) and all(b.is_bounded for b in dom):
        dom = union_normalize(list(dom), dom.dim)
        return _exact_enclosure(step_integral(f.core, dom), dom)
    if f.nonnegative or certify_nonnegative(f):
        return mimura_integrate(f, dom, eps, budget, **kw)
    plus, minus = pos_neg_split(f)
    ip = mimura_integrate(plus, dom, eps / 2, budget, **kw)
    im = mimura_integrate(minus, dom, eps / 2, budget, **kw)
    if ip.upper == INF or im.upper == INF:
        raise NotIntegrable("positive or negative part has no finite upper integral: not in M1")
    trace = [TraceEntry(i, a.cells + b.cells, a.lower - b.upper, a.upper - b.lower)
             for i, (a, b) in enumerate(zip(_pad(ip.trace, im.trace), _pad(im.trace, ip.trace)))]
    return IntegralEnclosure(ip.lower - im.upper, ip.upper - im.lower, ip.converged and im.converged,
                             trace, ip.cells + im.cells, Fraction(0), "signed")


def _pad(a: list, b: list) -> list:
    return a + [a[-1]] * (len(b) - len(a))


def integrate_complex(re: FunctionRep, im: FunctionRep | None, domain=None, eps=Fraction(1, 10**6),
                      budget: int = 1 << 21, **kw):
    """Real and imaginary parts integrated separately."""
    r = integrate_signed(re, domain, eps, budget, **kw)
    if im is None:
        dom = _as_domain(re, domain)
        i = _exact_enclosure(Fraction(0), union_normalize(list(dom), dom.dim))
    else:
        i = integrate_signed(im, domain, eps, budget, **kw)
    return r, i


def integrate_on_set(f: FunctionRep, e, eps=Fraction(1, 10**4), budget: int = 1 << 18) -> IntegralEnclosure:
    """Integral of ``f * indicator(e)`` for a set representation ``e``.

    Box-union sets are handled exactly by restricting the domain.  Otherwise
    the set is paved: the certified-inside cells are integrated and the
    undecided cells add at most their measure times the local supremum.
    """
    from .measure import pave

    eps = Fraction(eps)
    exact = e.as_boxunion()
    if exact is not None:
        dom = union_normalize([intersect(a, b) for a in exact for b in f.domain], f.dim)
        return mimura_integrate(f, dom, eps, budget)
    _require_nonnegative(f)
    pv = pave(e, eps / 2, budget)
    inner = pv.inside_boxes()
    if inner:
        enc = mimura_integrate(f, BoxUnion(inner, f.dim), eps / 2, budget, separable=False)
    else:
        enc = _exact_enclosure(Fraction(0), BoxUnion([], f.dim))
    if len(pv.undecided):
        flo, fhi = _evaluate_cells(f.core, pv.undecided, pv.bases)
        fhi = np.maximum(fhi, 0.0)
        e2 = pv.undecided.log2_measure(pv.bases)
        g = pv.bases.group[pv.undecided.base]
        boundary = grouped_exact_sum(fhi, e2, g, pv.bases.factors)
    else:
        boundary = Fraction(0)
    upper = INF if enc.upper == INF or boundary == INF else enc.upper + boundary
    converged = pv.converged and enc.converged and upper != INF and upper - enc.lower < eps
    return IntegralEnclosure(enc.lower, upper, converged, enc.trace, enc.cells, boundary, "on-set")
