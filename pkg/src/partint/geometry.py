"""Exact axis-aligned boxes and a disjoint-box-union set algebra.

Endpoints are :class:`fractions.Fraction` values (dyadic in the common case)
or the ``-inf``/``inf`` sentinels.  Boxes are open; shared faces are null sets,
so two boxes that only touch are disjoint for every purpose here.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

INF = math.inf
NEG_INF = -math.inf


class InfiniteMeasure(ArithmeticError):
    """A measure or size was requested for an unbounded box."""


class DimensionMismatch(ValueError):
    pass


class NotContained(ValueError):
    pass


# -- dyadic rationals ---------------------------------------------------------


def dyadic(numerator: int, exponent: int) -> Fraction:
    """Return ``numerator / 2**exponent``."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    return Fraction(numerator, 1 << exponent)


def dyadic_parts(q) -> tuple[int, int]:
    """Canonical ``(numerator, exponent)`` of a dyadic rational.

    The numerator is odd (or zero with exponent 0).  Raises ``ValueError`` for
    rationals whose denominator is not a power of two.
    """
    q = Fraction(q)
    den = q.denominator
    if den & (den - 1):
        raise ValueError(f"{q} is not dyadic")
    return q.numerator, den.bit_length() - 1


def is_dyadic(q) -> bool:
    if isinstance(q, float) and math.isinf(q):
        return False
    den = Fraction(q).denominator
    return den & (den - 1) == 0


def as_endpoint(v):
    """Coerce to an exact endpoint: ``Fraction`` or an infinite float."""
    if isinstance(v, float):
        if math.isinf(v):
            return v
        if math.isnan(v):
            raise ValueError("NaN endpoint")
    return Fraction(v)


def format_rational(q) -> str:
    """Serialise as ``p/q`` (always with a denominator) or ``inf``/``-inf``."""
    if isinstance(q, float) and math.isinf(q):
        return "inf" if q > 0 else "-inf"
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# -- boxes --------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Open box ``prod (lo[i], hi[i])``.  Any degenerate axis makes it empty."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("box needs matching, nonempty lo/hi")
        lo = tuple(as_endpoint(v) for v in self.lo)
        hi = tuple(as_endpoint(v) for v in self.hi)
        if any(a >= b for a, b in zip(lo, hi)):
            # canonical empty box so that equality is meaningful
            lo = hi = (Fraction(0),) * len(lo)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_bounds(cls, *bounds) -> "Box":
        """``Box.from_bounds((0, 1), (0, 2))`` is ``(0,1)x(0,2)``."""
        return cls(tuple(b[0] for b in bounds), tuple(b[1] for b in bounds))

    @classmethod
    def empty(cls, dim: int) -> "Box":
        return cls((0,) * dim, (0,) * dim)

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls((0,) * dim, (1,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def is_empty(self) -> bool:
        return any(a >= b for a, b in zip(self.lo, self.hi))

    @property
    def is_bounded(self) -> bool:
        return all(not isinstance(v, float) for v in self.lo + self.hi)

    def widths(self) -> tuple:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def contains_point(self, x: Sequence) -> bool:
        return all(a < xi < b for a, xi, b in zip(self.lo, x, self.hi))

    def contains_box(self, other: "Box") -> bool:
        """Closure containment; an empty box is contained in everything."""
        if other.is_empty:
            return True
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def product(self, other: "Box") -> "Box":
        if self.is_empty or other.is_empty:
            return Box.empty(self.dim + other.dim)
        return Box(self.lo + other.lo, self.hi + other.hi)

    def project(self, axes: Sequence[int]) -> "Box":
        return Box(tuple(self.lo[i] for i in axes), tuple(self.hi[i] for i in axes))

    def midpoint(self) -> tuple:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        return "x".join(f"({_fmt(a)},{_fmt(b)})" for a, b in zip(self.lo, self.hi))


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if v > 0 else "-inf"
    return str(v)


def box_measure(b: Box) -> Fraction:
    if b.is_empty:
        return Fraction(0)
    if not b.is_bounded:
        raise InfiniteMeasure(f"box {b} has infinite measure")
    m = Fraction(1)
    for w in b.widths():
        m *= w
    return m


def box_size(b: Box) -> Fraction:
    if b.is_empty:
        return Fraction(0)
    if not b.is_bounded:
        raise InfiniteMeasure(f"box {b} has infinite size")
    return sum(b.widths(), Fraction(0))


def intersect(a: Box, b: Box) -> Box:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} vs {b.dim}")
    return Box(tuple(map(max, a.lo, b.lo)), tuple(map(min, a.hi, b.hi)))


def bisect_box(b: Box, axis: int | None = None) -> tuple[Box, Box]:
    """Halve ``b`` along ``axis``, by default its longest (lowest index on ties)."""
    if axis is None:
        widths = b.widths()
        axis = max(range(b.dim), key=lambda i: (widths[i], -i))
    mid = (b.lo[axis] + b.hi[axis]) / 2
    left_hi = b.hi[:axis] + (mid,) + b.hi[axis + 1:]
    right_lo = b.lo[:axis] + (mid,) + b.lo[axis + 1:]
    return Box(b.lo, left_hi), Box(right_lo, b.hi)


def box_difference(a: Box, b: Box) -> list[Box]:
    """Disjoint boxes covering ``a \\ b`` up to faces."""
    cut = intersect(a, b)
    if cut.is_empty:
        return [] if a.is_empty else [a]
    out = []
    lo, hi = list(a.lo), list(a.hi)
    for i in range(a.dim):
        if lo[i] < cut.lo[i]:
            out.append(Box(tuple(lo), tuple(hi[:i] + [cut.lo[i]] + hi[i + 1:])))
        if cut.hi[i] < hi[i]:
            out.append(Box(tuple(lo[:i] + [cut.hi[i]] + lo[i + 1:]), tuple(hi)))
        lo[i], hi[i] = cut.lo[i], cut.hi[i]
    return out


# -- box unions ---------------------------------------------------------------


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of open boxes with pairwise disjoint interiors.

    The constructor trusts its caller on disjointness; build from arbitrary
    boxes with :func:`union_normalize`.
    """

    boxes: tuple
    dim: int

    def __init__(self, boxes: Iterable[Box] = (), dim: int | None = None):
        boxes = tuple(b for b in boxes if not b.is_empty)
        if dim is None:
            if not boxes:
                raise ValueError("dimension required for an empty union")
            dim = boxes[0].dim
        if any(b.dim != dim for b in boxes):
            raise DimensionMismatch("mixed dimensions in BoxUnion")
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "dim", dim)

    def __iter__(self):
        return iter(self.boxes)

    def __len__(self):
        return len(self.boxes)

    @property
    def is_empty(self) -> bool:
        return not self.boxes

    def measure(self) -> Fraction:
        return sum((box_measure(b) for b in self.boxes), Fraction(0))

    def is_disjoint(self) -> bool:
        bs = self.boxes
        return all(
            intersect(bs[i], bs[j]).is_empty for i in range(len(bs)) for j in range(i + 1, len(bs))
        )

    def bounding_box(self) -> Box:
        if not self.boxes:
            return Box.empty(self.dim)
        return Box(
            tuple(min(b.lo[i] for b in self.boxes) for i in range(self.dim)),
            tuple(max(b.hi[i] for b in self.boxes) for i in range(self.dim)),
        )

    def contains_point(self, x) -> bool:
        return any(b.contains_point(x) for b in self.boxes)

    def __str__(self) -> str:
        return " | ".join(str(b) for b in self.boxes) if self.boxes else "empty"


def _merge_intervals(ivs: list[tuple]) -> list[tuple]:
    ivs = sorted(ivs)
    out: list[list] = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(iv) for iv in out]


def _normalize(boxes: list[Box], dim: int) -> list[Box]:
    if not boxes:
        return []
    if dim == 1:
        return [Box((a,), (b,)) for a, b in _merge_intervals([(b.lo[0], b.hi[0]) for b in boxes])]
    cuts = sorted({v for b in boxes for v in (b.lo[0], b.hi[0])})
    slabs: list[tuple[tuple, list[Box]]] = []
    for x0, x1 in zip(cuts, cuts[1:]):
        inside = [b for b in boxes if b.lo[0] <= x0 and x1 <= b.hi[0]]
        if not inside:
            continue
        section = _normalize([Box(b.lo[1:], b.hi[1:]) for b in inside], dim - 1)
        if slabs and slabs[-1][0][1] == x0 and slabs[-1][1] == section:
            slabs[-1] = ((slabs[-1][0][0], x1), section)
        else:
            slabs.append(((x0, x1), section))
    return [Box((x0,) + s.lo, (x1,) + s.hi) for (x0, x1), section in slabs for s in section]


def union_normalize(boxes: Iterable[Box], dim: int | None = None) -> BoxUnion:
    """Disjoint-interior union equal to the input union up to shared faces.

    A recursive sweep over the first axis; adjacent slabs with identical cross
    sections are merged, so the output is canonical for a given point set.
    """
    boxes = [b for b in boxes if not b.is_empty]
    if dim is None:
        if not boxes:
            raise ValueError("dimension required for an empty union")
        dim = boxes[0].dim
    if any(b.dim != dim for b in boxes):
        raise DimensionMismatch("mixed dimensions")
    return BoxUnion(_normalize(boxes, dim), dim)


def union_of(*unions: BoxUnion) -> BoxUnion:
    dim = unions[0].dim
    return union_normalize([b for u in unions for b in u], dim)


def intersect_unions(u: BoxUnion, v: BoxUnion) -> BoxUnion:
    if u.dim != v.dim:
        raise DimensionMismatch("mixed dimensions")
    return union_normalize([intersect(a, b) for a in u for b in v], u.dim)


def difference(u: BoxUnion, v: BoxUnion) -> BoxUnion:
    pieces = list(u)
    for b in v:
        pieces = [p for q in pieces for p in box_difference(q, b)]
    return union_normalize(pieces, u.dim)


def complement_within(ambient: Box, u: BoxUnion) -> BoxUnion:
    """Boxes ``v`` with ``u`` and ``v`` tiling ``ambient`` a.e."""
    if u.dim != ambient.dim:
        raise DimensionMismatch("mixed dimensions")
    for b in u:
        if not ambient.contains_box(b):
            raise NotContained(f"{b} is not inside {ambient}")
    return difference(BoxUnion([ambient], ambient.dim), u)


def subset_ae(u: BoxUnion, v: BoxUnion) -> bool:
    """Whether ``u`` is contained in ``v`` up to a null set (bounded unions)."""
    return difference(u, v).measure() == 0


# -- literal syntax -----------------------------------------------------------

_NUM = r"-?\s*(?:inf|\d+(?:\.\d*)?(?:[eE][-+]?\d+)?(?:\s*/\s*\d+(?:\s*\^\s*\d+)?)?)"
_IV = re.compile(r"\(\s*(" + _NUM + r")\s*,\s*(" + _NUM + r")\s*\)")


def parse_number(tok: str):
    """Parse ``3``, ``0.25``, ``1e-3``, ``1/3``, ``3/2^4``, ``inf``, ``-inf``."""
    t = tok.replace(" ", "")
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return NEG_INF
    if "/" in t:
        num, den = t.split("/", 1)
        if "^" in den:
            base, exp = den.split("^", 1)
            den_v = Fraction(int(base) ** int(exp))
        else:
            den_v = Fraction(den)
        return Fraction(num) / den_v
    return Fraction(t)


def parse_box(text: str) -> Box:
    """Parse ``(a1,b1)x(a2,b2)x...``."""
    s = text.strip()
    parts = []
    pos = 0
    while True:
        m = _IV.match(s, pos)
        if not m:
            raise ValueError(f"bad box literal at column {pos}: {text!r}")
        parts.append((parse_number(m.group(1)), parse_number(m.group(2))))
        pos = m.end()
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos == len(s):
            break
        if s[pos] not in "x*":
            raise ValueError(f"expected 'x' at column {pos}: {text!r}")
        pos += 1
        while pos < len(s) and s[pos].isspace():
            pos += 1
    lo = tuple(a for a, _ in parts)
    hi = tuple(b for _, b in parts)
    if any(a > b for a, b in zip(lo, hi)):
        raise ValueError(f"lower endpoint exceeds upper in {text!r}")
    return Box(lo, hi)


def parse_boxes(text: str) -> BoxUnion:
    """Parse a union written as box literals separated by ``|`` or ``;``."""
    items = [t for t in re.split(r"[|;]", text) if t.strip()]
    if not items:
        raise ValueError("no boxes given")
    boxes = [parse_box(t) for t in items]
    return union_normalize(boxes, boxes[0].dim)
