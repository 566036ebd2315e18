"""Outer/inner measure enclosures of represented sets.

Sets built only from boxes are measured exactly through the box algebra.
Everything else is paved: cubes of a bounded window are classified as
inside, outside or undecided from interval bounds, and only undecided cubes
are split.  Inside cubes give the inner bound; inside plus undecided give the
outer bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cells import Bases, Cells, grouped_exact_sum
from .expr import Coord, Const, Piecewise, Sub, _float_down, _float_up, evaluate
from .funcrep import FunctionRep, ess_sup
from .geometry import (
    Box,
    BoxUnion,
    complement_within,
    difference,
    intersect,
    intersect_unions,
    subset_ae,
    union_normalize,
)
from .nullset import NullCertificate

OUT, IN, UNDECIDED = 0, 1, 2


# -- set representations -----------------------------------------------------------


class SetRep:
    dim: int

    def window(self) -> Box:
        raise NotImplementedError

    def classify(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def as_boxunion(self) -> BoxUnion | None:
        """The set as an exact box union when it is built from boxes only."""
        return None

    def __and__(self, other: "SetRep") -> "SetRep":
        return Intersection((self, other))


def _box_classify(boxes, lo, hi) -> np.ndarray:
    n = lo.shape[0]
    inside = np.zeros(n, bool)
    touches = np.zeros(n, bool)
    for b in boxes:
        if b.is_empty:
            continue
        in_lo = np.array([_float_up(v) for v in b.lo])
        in_hi = np.array([_float_down(v) for v in b.hi])
        out_lo = np.array([_float_down(v) for v in b.lo])
        out_hi = np.array([_float_up(v) for v in b.hi])
        inside |= np.all((in_lo <= lo) & (hi <= in_hi), axis=1)
        touches |= np.all((lo < out_hi) & (out_lo < hi), axis=1)
    out = np.full(n, UNDECIDED, dtype=np.int8)
    out[~touches] = OUT
    out[inside] = IN
    return out


@dataclass(frozen=True)
class Boxes(SetRep):
    union: BoxUnion

    def __init__(self, union, dim: int | None = None):
        if isinstance(union, Box):
            union = BoxUnion([union], union.dim)
        elif not isinstance(union, BoxUnion):
            union = union_normalize(list(union), dim)
        object.__setattr__(self, "union", union_normalize(list(union), union.dim))

    @property
    def dim(self) -> int:
        return self.union.dim

    def window(self) -> Box:
        return self.union.bounding_box()

    def classify(self, lo, hi):
        return _box_classify(self.union, lo, hi)

    def as_boxunion(self):
        return self.union

    def __str__(self):
        return f"box {self.union}"


@dataclass(frozen=True)
class LevelSet(SetRep):
    """``{x in window : f(x) > a}`` (``direction='>'``) or ``f(x) < a``."""

    f: FunctionRep
    threshold: Fraction
    direction: str
    region: Box

    def __post_init__(self):
        if self.direction not in (">", "<"):
            raise ValueError("direction must be '>' or '<'")
        object.__setattr__(self, "threshold", Fraction(self.threshold))
        if self.region.dim != self.f.dim:
            raise ValueError("window dimension does not match the function")

    @property
    def dim(self) -> int:
        return self.f.dim

    def window(self) -> Box:
        return self.region

    def classify(self, lo, hi):
        out = _box_classify([self.region], lo, hi)
        live = np.flatnonzero(out != OUT)
        if len(live) == 0:
            return out
        flo, fhi, offenders = evaluate(self.f.core, lo[live], hi[live])
        cls = np.full(len(live), UNDECIDED, dtype=np.int8)
        if self.direction == ">":
            cls[flo > _float_up(self.threshold)] = IN
            cls[fhi <= _float_down(self.threshold)] = OUT
        else:
            cls[fhi < _float_down(self.threshold)] = IN
            cls[flo >= _float_up(self.threshold)] = OUT
        for _, bad in offenders:
            cls[bad] = UNDECIDED
        region = out[live]
        cls = np.where((region == UNDECIDED) & (cls == IN), UNDECIDED, cls)
        out[live] = cls
        return out

    def __str__(self):
        return f"level {self.f.core} {self.direction} {self.threshold} in {self.region}"


@dataclass(frozen=True)
class ComplementWithin(SetRep):
    ambient: Box
    inner: SetRep

    @property
    def dim(self) -> int:
        return self.ambient.dim

    def window(self) -> Box:
        return self.ambient

    def classify(self, lo, hi):
        amb = _box_classify([self.ambient], lo, hi)
        inn = self.inner.classify(lo, hi)
        out = np.full(len(amb), UNDECIDED, dtype=np.int8)
        out[(amb == IN) & (inn == OUT)] = IN
        out[(amb == OUT) | (inn == IN)] = OUT
        return out

    def as_boxunion(self):
        u = self.inner.as_boxunion()
        if u is None:
            return None
        clipped = union_normalize([intersect(b, self.ambient) for b in u], self.dim)
        return complement_within(self.ambient, clipped)


@dataclass(frozen=True)
class NullModified(SetRep):
    """``inner`` with a null set added or removed; measures are unchanged."""

    inner: SetRep
    cert: NullCertificate = field(compare=False)

    @property
    def dim(self) -> int:
        return self.inner.dim

    def window(self) -> Box:
        return self.inner.window()

    def classify(self, lo, hi):
        return self.inner.classify(lo, hi)

    def as_boxunion(self):
        return self.inner.as_boxunion()


@dataclass(frozen=True)
class Intersection(SetRep):
    parts: tuple

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def window(self) -> Box:
        w = self.parts[0].window()
        for p in self.parts[1:]:
            w = intersect(w, p.window())
        return w

    def classify(self, lo, hi):
        cs = [p.classify(lo, hi) for p in self.parts]
        out = np.full(len(cs[0]), UNDECIDED, dtype=np.int8)
        out[np.all([c == IN for c in cs], axis=0)] = IN
        out[np.any([c == OUT for c in cs], axis=0)] = OUT
        return out

    def as_boxunion(self):
        us = [p.as_boxunion() for p in self.parts]
        if any(u is None for u in us):
            return None
        acc = us[0]
        for u in us[1:]:
            acc = intersect_unions(acc, u)
        return acc


@dataclass(frozen=True)
class Union(SetRep):
    parts: tuple

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def window(self) -> Box:
        return union_normalize([p.window() for p in self.parts], self.dim).bounding_box()

    def classify(self, lo, hi):
        cs = [p.classify(lo, hi) for p in self.parts]
        out = np.full(len(cs[0]), UNDECIDED, dtype=np.int8)
        out[np.all([c == OUT for c in cs], axis=0)] = OUT
        out[np.any([c == IN for c in cs], axis=0)] = IN
        return out

    def as_boxunion(self):
        us = [p.as_boxunion() for p in self.parts]
        if any(u is None for u in us):
            return None
        return union_normalize([b for u in us for b in u], self.dim)


def null_set(cert: NullCertificate) -> SetRep:
    """A certified null set, as a set representation of measure zero."""
    return NullModified(Boxes(BoxUnion([], cert.dim)), cert)


# -- paving ------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureEnclosure:
    inner: Fraction
    outer: Fraction
    converged: bool

    def __post_init__(self):
        if self.inner > self.outer:
            raise ValueError("inner bound exceeds outer bound")

    @property
    def width(self):
        return self.outer - self.inner

    # the same interface as an integral enclosure, for agree()
    @property
    def lower(self):
        return self.inner

    @property
    def upper(self):
        return self.outer


@dataclass
class Paving:
    bases: Bases | None
    inside: list  # chunks of Cells
    undecided: Cells | None
    inner: Fraction
    outer: Fraction
    converged: bool
    evaluated: int

    def inside_boxes(self) -> list[Box]:
        out = []
        for c in self.inside:
            out.extend(c.boxes(self.bases))
        return out

    def enclosure(self) -> MeasureEnclosure:
        return MeasureEnclosure(self.inner, self.outer, self.converged)


def _measure_of(cells: Cells, bases: Bases) -> Fraction:
    if len(cells) == 0:
        return Fraction(0)
    ones = np.ones(len(cells))
    return grouped_exact_sum(ones, cells.log2_measure(bases), bases.group[cells.base], bases.factors)


def pave(e: SetRep, eps=Fraction(1, 10**3), budget: int = 1 << 21, window: Box | None = None,
         keep_inside: bool = True) -> Paving:
    """Refine undecided cubes of ``window`` until ``outer - inner < eps``.

    ``budget`` caps the number of classified cells.
    """
    eps = Fraction(eps)
    w = window if window is not None else e.window()
    if not w.is_bounded:
        raise ValueError("paving needs a bounded window")
    if w.is_empty:
        return Paving(None, [], None, Fraction(0), Fraction(0), True, 0)
    bases = Bases([w])
    cells = Cells.initial(1, w.dim, 0)
    inner = Fraction(0)
    inside: list = []
    evaluated = 0
    converged = False
    while True:
        lo, hi = cells.bounds(bases)
        cls = e.classify(lo, hi)
        evaluated += len(cells)
        got = cells.take(cls == IN)
        inner += _measure_of(got, bases)
        if keep_inside and len(got):
            inside.append(got)
        cells = cells.take(cls == UNDECIDED)
        undecided = _measure_of(cells, bases)
        if undecided < eps:
            converged = True
            break
        cells = cells.take(cells.splittable())
        if len(cells) == 0 or evaluated + 2 * len(cells) > budget:
            break
        axis = cells.split_axis(bases)
        left, right = cells.children(axis)
        cells = Cells(np.concatenate([left.base, right.base]),
                      np.concatenate([left.lev, right.lev]),
                      np.concatenate([left.k, right.k]))
    return Paving(bases, inside, cells, inner, inner + _measure_of(cells, bases), converged, evaluated)


def measure_enclosure(e: SetRep, eps=Fraction(1, 10**3), budget: int = 1 << 21) -> MeasureEnclosure:
    exact = e.as_boxunion()
    if exact is not None:
        if any(not b.is_bounded for b in exact):
            raise ValueError("set has infinite measure or needs a window")
        m = exact.measure()
        return MeasureEnclosure(m, m, True)
    return pave(e, eps, budget, keep_inside=False).enclosure()


def outer_measure(e: SetRep, eps=Fraction(1, 10**3), budget: int = 1 << 21) -> MeasureEnclosure:
    """Upper bound ``outer`` on the outer measure (``inner`` is the best lower witness)."""
    return measure_enclosure(e, eps, budget)


def inner_measure(e: SetRep, eps=Fraction(1, 10**3), budget: int = 1 << 21) -> Fraction:
    return measure_enclosure(e, eps, budget).inner


# -- Caratheodory ------------------------------------------------------------------

PASS_EXACT = "PASS-exact"
PASS_WITHIN = "PASS-within-enclosure"
UNDECIDED_VERDICT = "UNDECIDED"
FAIL = "FAIL"


@dataclass(frozen=True)
class CaratheodoryResult:
    verdict: str
    test_set: Fraction | MeasureEnclosure
    with_set: Fraction | MeasureEnclosure
    without_set: Fraction | MeasureEnclosure
    margin: tuple  # enclosure of mu(A) - mu(A & E) - mu(A \ E)


def _split_parts(e: SetRep, a: SetRep):
    w = a.window()
    return a, Intersection((a, e)), Intersection((a, ComplementWithin(w, e)))


def caratheodory_check(e: SetRep, tests, eps=Fraction(1, 10**3), budget: int = 1 << 20) -> list:
    """Check ``mu(A) = mu(A & E) + mu(A \\ E)`` for every test set ``A``.

    Exact when all sets are box unions; otherwise the verdict is derived from
    the enclosure of the defect and is FAIL only when that enclosure excludes 0.
    """
    eps = Fraction(eps)
    out = []
    for a in tests:
        parts = _split_parts(e, a)
        exact = [p.as_boxunion() for p in parts]
        if all(u is not None for u in exact):
            ma, mae, mac = (u.measure() for u in exact)
            defect = ma - mae - mac
            verdict = PASS_EXACT if defect == 0 else FAIL
            out.append(CaratheodoryResult(verdict, ma, mae, mac, (defect, defect)))
            continue
        encs = [measure_enclosure(p, eps / 3, budget) for p in parts]
        lo = encs[0].inner - encs[1].outer - encs[2].outer
        hi = encs[0].outer - encs[1].inner - encs[2].inner
        if lo > 0 or hi < 0:
            verdict = FAIL
        elif hi - lo <= eps:
            verdict = PASS_WITHIN
        else:
            verdict = UNDECIDED_VERDICT
        out.append(CaratheodoryResult(verdict, *encs, (lo, hi)))
    return out


# -- subgraphs ---------------------------------------------------------------------


def _ceiling_of(f: FunctionRep, window: Box) -> Fraction | None:
    s = ess_sup(f, window, Fraction(1, 1 << 10))
    if s.hi == float("inf"):
        return None
    grid = Fraction(1, 1 << 10)
    return -((-s.hi) // grid) * grid


def subgraph(f: FunctionRep, window: Box | None = None, ceiling=None) -> SetRep:
    """``{(x, t) : x in window, 0 < t < f(x)}`` in one more dimension."""
    if window is None:
        if len(f.domain) != 1:
            raise ValueError("subgraph needs a window box")
        window = f.domain.boxes[0]
    d = f.dim
    core = f.core
    if isinstance(core, Const):
        c = core.value
        return Boxes(BoxUnion([window.product(Box((0,), (c,)))] if c > 0 else [], d + 1))
    if isinstance(core, Piecewise) and core.is_step:
        boxes = []
        rest = BoxUnion([window], d)
        for b, v in core.pieces:
            piece = union_normalize([intersect(a, b) for a in rest], d)
            if v.value > 0:
                boxes.extend(p.product(Box((0,), (v.value,))) for p in piece)
            rest = difference(rest, BoxUnion([b], d))
        if core.default.value > 0:
            boxes.extend(p.product(Box((0,), (core.default.value,))) for p in rest)
        return Boxes(BoxUnion(boxes, d + 1) if boxes else BoxUnion([], d + 1))
    top = Fraction(ceiling) if ceiling is not None else _ceiling_of(f, window)
    if top is None:
        raise ValueError("no finite essential supremum on the window: supply a ceiling")
    if top <= 0:
        return Boxes(BoxUnion([], d + 1))
    region = window.product(Box((0,), (top,)))
    g = FunctionRep(Sub(core, Coord(d)), BoxUnion([region], d + 1), (), False)
    return LevelSet(g, Fraction(0), ">", region)


@dataclass(frozen=True)
class IdentityReport:
    name: str
    status: str
    left: object
    right: object
    tolerance: Fraction


def subgraph_measure_check(f: FunctionRep, domain: Box | None = None, eps=Fraction(1, 10**3),
                           budget: int = 1 << 22) -> IdentityReport:
    """Paving measure of the subgraph against the integral enclosure of ``f``."""
    from .integrate import agree, mimura_integrate

    eps = Fraction(eps)
    if domain is None:
        domain = f.domain.boxes[0]
    g = subgraph(f, domain)
    area = measure_enclosure(g, eps / 2, budget)
    integral = mimura_integrate(f, domain, eps / 8)
    ok = agree(area, integral, eps)
    return IdentityReport("subgraph", "PASS" if ok else "UNDECIDED", area, integral, eps)


# -- sigma additivity and continuity ----------------------------------------------


@dataclass(frozen=True)
class AdditivityReport:
    status: str
    union: MeasureEnclosure
    parts_total: tuple  # (sum of inner, sum of outer)
    exact: bool


def sigma_additivity_check(parts, eps=Fraction(1, 10**3), budget: int = 1 << 20) -> AdditivityReport:
    """Measure of the disjoint union against the sum of the measures."""
    parts = list(parts)
    if not parts:
        z = MeasureEnclosure(Fraction(0), Fraction(0), True)
        return AdditivityReport("PASS", z, (Fraction(0), Fraction(0)), True)
    unions = [p.as_boxunion() for p in parts]
    if all(u is not None for u in unions):
        dim = parts[0].dim
        whole = union_normalize([b for u in unions for b in u], dim)
        total = sum((u.measure() for u in unions), Fraction(0))
        if whole.measure() != total:
            raise ValueError("parts overlap in a set of positive measure")
        enc = MeasureEnclosure(total, total, True)
        return AdditivityReport("PASS", enc, (total, total), True)
    encs = [measure_enclosure(p, eps / (2 * len(parts)), budget) for p in parts]
    whole = measure_enclosure(Union(tuple(parts)), eps / 2, budget)
    lo = sum((e.inner for e in encs), Fraction(0))
    hi = sum((e.outer for e in encs), Fraction(0))
    ok = max(lo, whole.inner) <= min(hi, whole.outer)
    return AdditivityReport("PASS" if ok else "FAIL", whole, (lo, hi), False)


@dataclass(frozen=True)
class ContinuityReport:
    status: str
    measures: tuple
    monotone: bool
    limit: Fraction
    distance: Fraction


def continuity_check(sets, limit, eps=Fraction(1, 10**6), budget: int = 1 << 20) -> ContinuityReport:
    """For ``E_1 <= E_2 <= ...`` check the measures increase towards ``limit``."""
    sets = list(sets)
    limit = Fraction(limit)
    unions = [s.as_boxunion() for s in sets]
    encs = [measure_enclosure(s, eps, budget) for s in sets]
    monotone = True
    for i in range(len(sets) - 1):
        if unions[i] is not None and unions[i + 1] is not None:
            if not subset_ae(unions[i], unions[i + 1]):
                raise ValueError("sequence is not increasing")
            monotone &= encs[i].outer <= encs[i + 1].inner
        else:
            monotone &= encs[i].inner <= encs[i + 1].outer
    dist = max(abs(limit - encs[-1].inner), abs(limit - encs[-1].outer))
    ok = monotone and dist <= eps
    return ContinuityReport("PASS" if ok else "FAIL", tuple(encs), monotone, limit, dist)


# -- level-set profile for the layer-cake check ------------------------------------


def level_set_profile(f: FunctionRep, window: Box, thresholds, budget: int = 1 << 16):
    """Enclosures ``[lo_k, hi_k]`` of ``mu({f > t_k} & window)`` for each threshold.

    One uniform grid of cubes is evaluated once; a cube counts towards ``lo``
    when its lower bound exceeds ``t`` and towards ``hi`` unless its upper
    bound is at most ``t``.
    """
    d = window.dim
    level = 0
    while (1 << (d * (level + 1))) <= budget:
        level += 1
    bases = Bases([window])
    cells = Cells.initial(1, d, level)
    lo, hi = cells.bounds(bases)
    flo, fhi, offenders = evaluate(f.core, lo, hi)
    if offenders:
        raise ValueError("function not evaluable on the window")
    flo = np.sort(flo)
    fhi = np.sort(fhi)
    n = len(flo)
    unit = bases.measures[0] / n
    out = []
    for t in thresholds:
        t = Fraction(t)
        above_lo = n - int(np.searchsorted(flo, _float_up(t), side="right"))
        above_hi = n - int(np.searchsorted(fhi, _float_down(t), side="right"))
        out.append((above_lo * unit, above_hi * unit))
    return out
