"""Finitely presented functions: a continuous core plus null-set modifications.

Essential infima and suprema of such a function equal the plain infima and
suprema of its core on open boxes, so nothing in this module that computes an
essential bound ever looks at ``modifications``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .expr import Const, DomainError, Expr, Max, Neg, box_bounds, evaluate, wrap
from .geometry import Box, BoxUnion, subset_ae, union_normalize
from .nullset import NullCertificate, rationals_in, union_null


class OutsideDomain(ValueError):
    pass


class NotNonnegative(ValueError):
    pass


@dataclass(frozen=True)
class Modification:
    where: NullCertificate
    value: Expr


@dataclass(frozen=True)
class FunctionRep:
    core: Expr
    domain: BoxUnion
    modifications: tuple = ()
    nonnegative: bool = False

    @property
    def dim(self) -> int:
        return self.domain.dim

    def modified(self, where: NullCertificate, value) -> "FunctionRep":
        mods = self.modifications + (Modification(where, wrap(value)),)
        return FunctionRep(self.core, self.domain, mods, self.nonnegative)

    def with_core(self, core: Expr, nonnegative: bool | None = None) -> "FunctionRep":
        nn = self.nonnegative if nonnegative is None else nonnegative
        return FunctionRep(core, self.domain, self.modifications, nn)

    def __str__(self) -> str:
        return f"f = {self.core} on {self.domain}"


@dataclass(frozen=True)
class RangeEnclosure:
    lo: object  # Fraction, or -inf
    hi: object  # Fraction, or inf

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty range enclosure")


@dataclass(frozen=True)
class EssEnclosure:
    lo: object
    hi: object
    converged: bool

    @property
    def width(self):
        return self.hi - self.lo


def _as_union(domain) -> BoxUnion:
    if isinstance(domain, BoxUnion):
        return domain
    if isinstance(domain, Box):
        return BoxUnion([domain], domain.dim)
    return union_normalize(list(domain))


def function(core, domain, nonnegative: bool = False) -> FunctionRep:
    return FunctionRep(wrap(core), _as_union(domain), (), nonnegative)


def dirichlet(domain=None) -> FunctionRep:
    """The indicator of the rationals: zero core, value 1 on the rationals."""
    domain = _as_union(domain if domain is not None else Box((0,), (1,)))
    cert = union_null([rationals_in(b) for b in domain], domain.dim)
    return FunctionRep(Const(Fraction(0)), domain, (Modification(cert, Const(Fraction(1))),), True)


def _to_rational(v):
    return Fraction(v) if np.isfinite(v) else float(v)


def eval_point(f: FunctionRep, x) -> object:
    x = tuple(Fraction(c) if not isinstance(c, Fraction) else c for c in x)
    if len(x) != f.dim:
        raise OutsideDomain(f"point of dimension {len(x)} for a {f.dim}-dimensional function")
    if not f.domain.contains_point(x):
        raise OutsideDomain(f"{x} is outside the domain {f.domain}")
    for mod in f.modifications:
        if mod.where.contains(x) is True:
            return mod.value.exact(x)
    return f.core.exact(x)


def _check_inside(f: FunctionRep, b: Box):
    if b.dim != f.dim:
        raise OutsideDomain("box dimension does not match the function")
    if b.is_bounded and all(bb.is_bounded for bb in f.domain):
        if not subset_ae(BoxUnion([b], b.dim), f.domain):
            raise OutsideDomain(f"{b} is not inside the domain {f.domain}")
    elif not any(d.contains_box(b) for d in f.domain):
        raise OutsideDomain(f"{b} is not inside the domain {f.domain}")


def _raise_offender(offenders):
    node, _ = offenders[0]
    raise DomainError(f"domain violation at node {node}", node)


def range_enclosure(f: FunctionRep, b: Box) -> RangeEnclosure:
    """Conservative interval enclosure of the core over ``b``."""
    _check_inside(f, b)
    if b.is_empty:
        raise ValueError("empty box has no range")
    lo, hi, offenders = evaluate(f.core, *box_bounds([b]))
    if offenders:
        _raise_offender(offenders)
    return RangeEnclosure(_to_rational(lo[0]), _to_rational(hi[0]))


def core_infimum(core: Expr, b: Box, tol, budget: int = 1 << 14) -> EssEnclosure:
    """Branch-and-bound enclosure of ``inf core`` over the open box ``b``."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    clo, chi = box_bounds([b])
    # inward bounds: a midpoint strictly inside these is inside the true box
    inner_lo = np.array([-np.inf if isinstance(v, float) else float(v) for v in b.lo])
    inner_hi = np.array([np.inf if isinstance(v, float) else float(v) for v in b.hi])
    ub = np.inf
    lb = -np.inf
    converged = False
    evaluated = 0
    while True:
        flo, fhi, _ = evaluate(core, clo, chi)
        evaluated += len(flo)
        with np.errstate(invalid="ignore", over="ignore"):
            mid = np.where(np.isfinite(clo) & np.isfinite(chi), (clo + chi) / 2,
                           np.where(np.isfinite(clo), clo + 1, np.where(np.isfinite(chi), chi - 1, 0.0)))
        valid = np.all((mid > inner_lo) & (mid < inner_hi), axis=1)
        if valid.any():
            _, mhi, moff = evaluate(core, mid[valid], mid[valid])
            if moff:
                bad = np.zeros(int(valid.sum()), bool)
                for _, m in moff:
                    bad |= m
                mhi = np.where(bad, np.inf, mhi)
            ub = min(ub, float(mhi.min()))
        keep = flo <= ub
        if not keep.any():
            keep = flo == flo.min()
        clo, chi, flo, fhi = clo[keep], chi[keep], flo[keep], fhi[keep]
        lb = float(flo.min())
        if np.isfinite(lb) and np.isfinite(ub) and Fraction(ub) - Fraction(lb) <= tol:
            converged = True
            break
        if evaluated >= budget:
            break
        width = np.where(np.isfinite(fhi - flo), fhi - flo, np.inf)
        wmax = width.max()
        sel = width >= wmax / 2 if np.isfinite(wmax) else ~np.isfinite(width)
        sel_idx = np.flatnonzero(sel)
        rest = np.flatnonzero(~sel)
        slo, shi = clo[sel_idx], chi[sel_idx]
        with np.errstate(invalid="ignore", over="ignore"):
            ext = np.where(np.isfinite(shi - slo), shi - slo, np.inf)
        axis = np.argmax(ext, axis=1)
        rows = np.arange(len(sel_idx))
        a, c = slo[rows, axis], shi[rows, axis]
        with np.errstate(invalid="ignore", over="ignore"):
            m = (a + c) / 2
        # unbounded axes are split at a point that moves outward geometrically
        m = np.where(np.isfinite(m), m,
                     np.where(np.isfinite(a), np.abs(a) * 2 + 1, np.where(np.isfinite(c), -np.abs(c) * 2 - 1, 0.0)))
        left_hi = shi.copy()
        left_hi[rows, axis] = m
        right_lo = slo.copy()
        right_lo[rows, axis] = m
        clo = np.concatenate([clo[rest], slo, right_lo])
        chi = np.concatenate([chi[rest], left_hi, shi])
    lo = _to_rational(lb)
    hi = _to_rational(ub)
    if hi < lo:
        hi = lo
    return EssEnclosure(lo, hi, converged)


def ess_inf(f: FunctionRep, b: Box, tol, budget: int = 1 << 14) -> EssEnclosure:
    """Enclosure ``[lo, hi]`` of the essential infimum of ``f`` over ``b``."""
    _check_inside(f, b)
    return core_infimum(f.core, b, tol, budget)


def ess_sup(f: FunctionRep, b: Box, tol, budget: int = 1 << 14) -> EssEnclosure:
    _check_inside(f, b)
    e = core_infimum(Neg(f.core), b, tol, budget)
    return EssEnclosure(-e.hi, -e.lo, e.converged)


def pos_neg_split(f: FunctionRep) -> tuple[FunctionRep, FunctionRep]:
    """``f = f_plus - f_minus`` with both parts nonnegative."""
    zero = Const(Fraction(0))
    plus_mods = tuple(Modification(m.where, Max(m.value, zero)) for m in f.modifications)
    minus_mods = tuple(Modification(m.where, Max(Neg(m.value), zero)) for m in f.modifications)
    plus = FunctionRep(Max(f.core, zero), f.domain, plus_mods, True)
    minus_core = zero if f.nonnegative else Max(Neg(f.core), zero)
    minus = FunctionRep(minus_core, f.domain, minus_mods, True)
    return plus, minus


def certify_nonnegative(f: FunctionRep, budget: int = 1 << 12) -> bool:
    """True when interval bounds prove the core is >= 0 on every domain box."""
    for b in f.domain:
        clo, chi = box_bounds([b])
        lo, _, offenders = evaluate(f.core, clo, chi)
        if not offenders and lo[0] >= 0:
            continue
        e = core_infimum(f.core, b, Fraction(1, 1 << 20), budget)
        if not (e.lo >= 0):
            return False
    return True
