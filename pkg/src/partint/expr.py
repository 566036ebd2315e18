"""Expression trees for the continuous cores of represented functions.

Nodes evaluate two ways: exactly (rationals where the operations allow it,
floats for library functions) at a point, and by outward-rounded interval
arithmetic over whole arrays of boxes at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intervals as ia
from .geometry import Box


class DomainError(ArithmeticError):
    """An operation was applied outside its certified domain."""

    def __init__(self, message: str, node: "Expr | None" = None):
        super().__init__(message)
        self.node = node


class _Ctx:
    __slots__ = ("offenders",)

    def __init__(self):
        self.offenders: list[tuple[Expr, np.ndarray]] = []

    def flag(self, node, bad):
        if bad.any():
            self.offenders.append((node, bad))


def wrap(v) -> "Expr":
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return Const(Fraction(v))
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite constant")
        return Const(Fraction(v))
    if isinstance(v, str):
        return Const(Fraction(v))
    raise TypeError(f"cannot use {v!r} in an expression")


class Expr:
    """Base node.  Subclasses are frozen dataclasses."""

    def _iv(self, blo, bhi, ctx):  # pragma: no cover - abstract
        raise NotImplementedError

    def exact(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    def coords(self) -> frozenset:
        return frozenset().union(*(c.coords() for c in self.children()))

    def children(self) -> tuple:
        return ()

    def reindex(self, mapping: dict) -> "Expr":
        raise NotImplementedError

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (tuple, list)):
            x = tuple(x[0])
        return self.exact(tuple(x))

    # arithmetic sugar
    def __add__(self, o):
        return Add(self, wrap(o))

    def __radd__(self, o):
        return Add(wrap(o), self)

    def __sub__(self, o):
        return Sub(self, wrap(o))

    def __rsub__(self, o):
        return Sub(wrap(o), self)

    def __mul__(self, o):
        return Mul(self, wrap(o))

    def __rmul__(self, o):
        return Mul(wrap(o), self)

    def __truediv__(self, o):
        return Div(self, wrap(o))

    def __rtruediv__(self, o):
        return Div(wrap(o), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, p):
        return Pow(self, Fraction(p))


def evaluate(expr: Expr, blo: np.ndarray, bhi: np.ndarray):
    """Interval enclosure of ``expr`` over each box ``[blo[i], bhi[i]]``.

    Returns ``(lo, hi, offenders)``; ``offenders`` lists ``(node, mask)`` for
    nodes that hit a domain violation on some boxes (those boxes get the whole
    real line).
    """
    blo = np.asarray(blo, dtype=float)
    bhi = np.asarray(bhi, dtype=float)
    if blo.ndim == 1:
        blo = blo[:, None]
        bhi = bhi[:, None]
    ctx = _Ctx()
    lo, hi = expr._iv(blo, bhi, ctx)
    n = blo.shape[0]
    lo = np.broadcast_to(lo, (n,)).astype(float, copy=True)
    hi = np.broadcast_to(hi, (n,)).astype(float, copy=True)
    return lo, hi, ctx.offenders


def box_bounds(boxes) -> tuple[np.ndarray, np.ndarray]:
    """Outward-rounded float arrays for a list of exact boxes."""
    boxes = list(boxes)
    d = boxes[0].dim if boxes else 1
    lo = np.empty((len(boxes), d))
    hi = np.empty((len(boxes), d))
    for i, b in enumerate(boxes):
        for j in range(d):
            lo[i, j] = _float_down(b.lo[j])
            hi[i, j] = _float_up(b.hi[j])
    return lo, hi


def _float_down(q) -> float:
    if isinstance(q, float):
        return q
    f = float(q)
    return f if Fraction(f) <= q else math.nextafter(f, -math.inf)


def _float_up(q) -> float:
    if isinstance(q, float):
        return q
    f = float(q)
    return f if Fraction(f) >= q else math.nextafter(f, math.inf)


# -- leaves -------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Fraction

    def _iv(self, blo, bhi, ctx):
        return ia.const(self.value, blo.shape[0])

    def exact(self, x):
        return self.value

    def reindex(self, mapping):
        return self

    def __str__(self):
        v = self.value
        if v.denominator == 1:
            return str(v.numerator) if v >= 0 else f"({v.numerator})"
        return f"({v.numerator}/{v.denominator})"


@dataclass(frozen=True, eq=True)
class Coord(Expr):
    index: int

    def _iv(self, blo, bhi, ctx):
        if self.index >= blo.shape[1]:
            raise DomainError(f"coordinate x{self.index} not available in dimension {blo.shape[1]}", self)
        return blo[:, self.index], bhi[:, self.index]

    def exact(self, x):
        return x[self.index]

    def coords(self):
        return frozenset((self.index,))

    def reindex(self, mapping):
        return Coord(mapping[self.index])

    def __str__(self):
        return _VAR_NAMES[self.index] if self.index < len(_VAR_NAMES) else f"x{self.index}"


_VAR_NAMES = ("x", "y", "z", "w")


# -- binary and unary nodes -----------------------------------------------------------


@dataclass(frozen=True, eq=True)
class _Binary(Expr):
    a: Expr
    b: Expr

    def __post_init__(self):
        object.__setattr__(self, "a", wrap(self.a))
        object.__setattr__(self, "b", wrap(self.b))

    def children(self):
        return (self.a, self.b)

    def reindex(self, mapping):
        return type(self)(self.a.reindex(mapping), self.b.reindex(mapping))


class Add(_Binary):
    def _iv(self, blo, bhi, ctx):
        return ia.iadd(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))

    def exact(self, x):
        return self.a.exact(x) + self.b.exact(x)

    def __str__(self):
        return f"({self.a} + {self.b})"


class Sub(_Binary):
    def _iv(self, blo, bhi, ctx):
        return ia.isub(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))

    def exact(self, x):
        return self.a.exact(x) - self.b.exact(x)

    def __str__(self):
        return f"({self.a} - {self.b})"


class Mul(_Binary):
    def _iv(self, blo, bhi, ctx):
        return ia.imul(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))

    def exact(self, x):
        return self.a.exact(x) * self.b.exact(x)

    def __str__(self):
        return f"({self.a} * {self.b})"


class Div(_Binary):
    """Division; the denominator's enclosure must not straddle zero."""

    def _iv(self, blo, bhi, ctx):
        lo, hi, bad = ia.idiv(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))
        ctx.flag(self, bad)
        return lo, hi

    def exact(self, x):
        den = self.b.exact(x)
        if den == 0:
            raise DomainError(f"division by zero in {self}", self)
        return self.a.exact(x) / den

    def __str__(self):
        return f"({self.a} / {self.b})"


class Min(_Binary):
    def _iv(self, blo, bhi, ctx):
        return ia.imin(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))

    def exact(self, x):
        return min(self.a.exact(x), self.b.exact(x))

    def __str__(self):
        return f"min({self.a}, {self.b})"


class Max(_Binary):
    def _iv(self, blo, bhi, ctx):
        return ia.imax(self.a._iv(blo, bhi, ctx), self.b._iv(blo, bhi, ctx))

    def exact(self, x):
        return max(self.a.exact(x), self.b.exact(x))

    def __str__(self):
        return f"max({self.a}, {self.b})"


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    a: Expr

    def __post_init__(self):
        object.__setattr__(self, "a", wrap(self.a))

    def children(self):
        return (self.a,)

    def reindex(self, mapping):
        return Neg(self.a.reindex(mapping))

    def _iv(self, blo, bhi, ctx):
        return ia.ineg(self.a._iv(blo, bhi, ctx))

    def exact(self, x):
        return -self.a.exact(x)

    def __str__(self):
        return f"(-{self.a})"


@dataclass(frozen=True, eq=True)
class Abs(Expr):
    a: Expr

    def __post_init__(self):
        object.__setattr__(self, "a", wrap(self.a))

    def children(self):
        return (self.a,)

    def reindex(self, mapping):
        return Abs(self.a.reindex(mapping))

    def _iv(self, blo, bhi, ctx):
        return ia.iabs(self.a._iv(blo, bhi, ctx))

    def exact(self, x):
        return abs(self.a.exact(x))

    def __str__(self):
        return f"abs({self.a})"


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    """``base ** exponent`` for a rational exponent.

    Integer exponents are exact; other exponents require ``base >= 0``.
    """

    base: Expr
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base", wrap(self.base))
        object.__setattr__(self, "exponent", Fraction(self.exponent))

    def children(self):
        return (self.base,)

    def reindex(self, mapping):
        return Pow(self.base.reindex(mapping), self.exponent)

    def _iv(self, blo, bhi, ctx):
        x = self.base._iv(blo, bhi, ctx)
        p = self.exponent
        if p.denominator == 1:
            lo, hi, bad = ia.ipow_int(x, int(p))
        elif p == Fraction(1, 2):
            lo, hi, bad = ia.isqrt(x)
        else:
            lo, hi, bad = ia.ipow_real(x, p)
        ctx.flag(self, bad)
        return lo, hi

    def exact(self, x):
        v = self.base.exact(x)
        p = self.exponent
        if p.denominator == 1:
            if v == 0 and p < 0:
                raise DomainError(f"0 to a negative power in {self}", self)
            return Fraction(v) ** int(p) if not isinstance(v, float) else v ** int(p)
        if v < 0:
            raise DomainError(f"negative base in {self}", self)
        if v == 0:
            if p < 0:
                raise DomainError(f"0 to a negative power in {self}", self)
            return Fraction(0)
        return float(v) ** float(p)

    def __str__(self):
        p = self.exponent
        ps = str(p.numerator) if p.denominator == 1 else f"({p.numerator}/{p.denominator})"
        return f"({self.base} ^ {ps})"


_FUNCS = {
    "exp": (ia.iexp, math.exp),
    "log": (ia.ilog, math.log),
    "sin": (ia.isin, math.sin),
    "cos": (ia.icos, math.cos),
    "sqrt": (ia.isqrt, math.sqrt),
}


@dataclass(frozen=True, eq=True)
class Func(Expr):
    name: str
    a: Expr

    def __post_init__(self):
        if self.name not in _FUNCS:
            raise ValueError(f"unknown function {self.name!r}")
        object.__setattr__(self, "a", wrap(self.a))

    def children(self):
        return (self.a,)

    def reindex(self, mapping):
        return Func(self.name, self.a.reindex(mapping))

    def _iv(self, blo, bhi, ctx):
        fn = _FUNCS[self.name][0]
        out = fn(self.a._iv(blo, bhi, ctx))
        if len(out) == 3:
            ctx.flag(self, out[2])
        return out[0], out[1]

    def exact(self, x):
        v = self.a.exact(x)
        if self.name == "log" and v <= 0:
            raise DomainError(f"log of nonpositive value in {self}", self)
        if self.name == "sqrt":
            if v < 0:
                raise DomainError(f"sqrt of negative value in {self}", self)
            if isinstance(v, Fraction):
                n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
                if n * n == v.numerator and d * d == v.denominator:
                    return Fraction(n, d)
        if v == 0 and self.name in ("exp", "cos"):
            return Fraction(1)
        if v == 0 and self.name == "sin":
            return Fraction(0)
        if v == 1 and self.name == "log":
            return Fraction(0)
        return _FUNCS[self.name][1](float(v))

    def __str__(self):
        return f"{self.name}({self.a})"


@dataclass(frozen=True, eq=True)
class Piecewise(Expr):
    """``pieces[k][1]`` on the open box ``pieces[k][0]``; ``default`` elsewhere.

    Faces of the boxes are null sets, and the interval evaluation is
    conservative up to them.
    """

    pieces: tuple
    default: Expr = Const(Fraction(0))

    def children(self):
        return tuple(e for _, e in self.pieces) + (self.default,)

    def coords(self):
        out = frozenset().union(*(c.coords() for c in self.children()))
        for b, _ in self.pieces:
            out |= frozenset(range(b.dim))
        return out

    def reindex(self, mapping):
        dims = sorted(mapping, key=mapping.get)
        if sorted(mapping.values()) != list(range(len(mapping))):
            raise ValueError("piecewise reindex needs a permutation")
        new = []
        for b, e in self.pieces:
            lo = [None] * b.dim
            hi = [None] * b.dim
            for old in dims:
                lo[mapping[old]] = b.lo[old]
                hi[mapping[old]] = b.hi[old]
            new.append((Box(tuple(lo), tuple(hi)), e.reindex(mapping)))
        return Piecewise(tuple(new), self.default.reindex(mapping))

    @property
    def is_step(self) -> bool:
        return isinstance(self.default, Const) and all(isinstance(e, Const) for _, e in self.pieces)

    def _iv(self, blo, bhi, ctx):
        n = blo.shape[0]
        lo = np.full(n, np.inf)
        hi = np.full(n, -np.inf)
        contained = np.zeros(n, bool)
        for box, e in self.pieces:
            if box.is_empty:
                continue
            plo_out, phi_out = box_bounds([box])
            plo_in = np.array([_float_up(v) for v in box.lo])
            phi_in = np.array([_float_down(v) for v in box.hi])
            overlap = np.all((blo < phi_out[0]) & (plo_out[0] < bhi), axis=1)
            inside = np.all((plo_in <= blo) & (bhi <= phi_in), axis=1)
            if not overlap.any():
                continue
            idx = np.flatnonzero(overlap)
            sub = _Ctx()
            elo, ehi = e._iv(blo[idx], bhi[idx], sub)
            elo = np.broadcast_to(elo, idx.shape)
            ehi = np.broadcast_to(ehi, idx.shape)
            for node, bad in sub.offenders:
                full = np.zeros(n, bool)
                full[idx] = bad
                ctx.flag(node, full)
            lo[idx] = np.minimum(lo[idx], elo)
            hi[idx] = np.maximum(hi[idx], ehi)
            contained |= inside
        need = ~contained
        if need.any():
            idx = np.flatnonzero(need)
            sub = _Ctx()
            dlo, dhi = self.default._iv(blo[idx], bhi[idx], sub)
            for node, bad in sub.offenders:
                full = np.zeros(n, bool)
                full[idx] = bad
                ctx.flag(node, full)
            lo[idx] = np.minimum(lo[idx], np.broadcast_to(dlo, idx.shape))
            hi[idx] = np.maximum(hi[idx], np.broadcast_to(dhi, idx.shape))
        return lo, hi

    def exact(self, x):
        for box, e in self.pieces:
            if box.contains_point(x):
                return e.exact(x)
        return self.default.exact(x)

    def __str__(self):
        body = "; ".join(f"{b}: {e}" for b, e in self.pieces)
        out = f"piecewise {{ {body} }}"
        if self.default != Const(Fraction(0)):
            out += f" else {self.default}"
        return out


# -- constructors -----------------------------------------------------------------


def coord(i: int) -> Coord:
    return Coord(i)


def const(v) -> Const:
    return Const(Fraction(v))


def exp(e) -> Func:
    return Func("exp", wrap(e))


def log(e) -> Func:
    return Func("log", wrap(e))


def sin(e) -> Func:
    return Func("sin", wrap(e))


def cos(e) -> Func:
    return Func("cos", wrap(e))


def sqrt(e) -> Pow:
    return Pow(wrap(e), Fraction(1, 2))


def minimum(a, b) -> Min:
    return Min(wrap(a), wrap(b))


def maximum(a, b) -> Max:
    return Max(wrap(a), wrap(b))


def absolute(a) -> Abs:
    return Abs(wrap(a))


def piecewise(pieces, default=0) -> Piecewise:
    return Piecewise(tuple((b, wrap(e)) for b, e in pieces), wrap(default))


def step(pieces) -> Piecewise:
    """Step function from ``(Box, value)`` pairs with disjoint boxes."""
    return piecewise([(b, Const(Fraction(v))) for b, v in pieces], 0)


def factors(e: Expr) -> list[Expr]:
    """Flatten a product tree into its factors."""
    if isinstance(e, Mul):
        return factors(e.a) + factors(e.b)
    return [e]
