"""Constructive certificates that a set is Lebesgue-null.

A certificate hands out, for any ``eps > 0``, a prefix of an open-box cover
together with an exact bound on the total measure of the *whole* cover
(emitted boxes plus the analytically bounded tail).  Point sets use the
``eps / 2**(m+1)`` budget split; unions split ``eps`` the same way across
members.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

from .geometry import Box, box_measure


@dataclass(frozen=True)
class Cover:
    boxes: tuple
    emitted_measure: Fraction
    tail_bound: Fraction

    @property
    def total_bound(self) -> Fraction:
        return self.emitted_measure + self.tail_bound


def _cube_around(x: Sequence[Fraction], allowance: Fraction) -> Box:
    """Dyadic-sided open cube centred on ``x`` with measure at most ``allowance``."""
    d = len(x)
    side = Fraction(1)
    while side ** d > allowance:
        side /= 2
    while (2 * side) ** d <= allowance:
        side *= 2
    h = side / 2
    return Box(tuple(xi - h for xi in x), tuple(xi + h for xi in x))


class NullCertificate:
    """Base class; subclasses implement :meth:`cover_for`."""

    dim: int

    def cover_for(self, eps, budget: int = 1000) -> Cover:
        raise NotImplementedError

    def contains(self, x) -> bool | None:
        """Membership if decidable for the given point, else ``None``."""
        return None


@dataclass(frozen=True)
class FinitePoints(NullCertificate):
    points: tuple
    dim: int = 1

    def __init__(self, points: Iterable, dim: int | None = None):
        pts = tuple(tuple(Fraction(c) for c in (p if isinstance(p, (tuple, list)) else (p,))) for p in points)
        if dim is None:
            dim = len(pts[0]) if pts else 1
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", dim)

    def cover_for(self, eps, budget: int = 1000) -> Cover:
        eps = Fraction(eps)
        if eps <= 0 or budget < 1:
            raise ValueError("need eps > 0 and budget >= 1")
        boxes = []
        total = Fraction(0)
        for j, p in enumerate(self.points):
            if j >= budget:
                break
            b = _cube_around(p, eps / 2 ** (j + 1))
            boxes.append(b)
            total += box_measure(b)
        emitted = len(boxes)
        # un-emitted points: each still gets at most eps/2^(j+1)
        tail = sum((eps / 2 ** (j + 1) for j in range(emitted, len(self.points))), Fraction(0))
        return Cover(tuple(boxes), total, tail)

    def contains(self, x) -> bool:
        try:
            xt = tuple(Fraction(c) for c in x)
        except (TypeError, ValueError):
            return False
        return xt in self.points


@dataclass(frozen=True)
class EnumerableSequence(NullCertificate):
    """A countable point set given by an indexed generator (points 1, 2, ...).

    The m-th point receives a cube of measure at most ``eps / 2**(m+1)``, so the
    whole cover is bounded by ``eps / 2``.
    """

    generate: Callable[[], Iterator[tuple]]
    dim: int
    label: str = "sequence"
    member: Callable[[tuple], bool | None] | None = field(default=None, compare=False)

    def cover_for(self, eps, budget: int = 1000) -> Cover:
        eps = Fraction(eps)
        if eps <= 0 or budget < 1:
            raise ValueError("need eps > 0 and budget >= 1")
        boxes = []
        total = Fraction(0)
        for m, p in enumerate(itertools.islice(self.generate(), budget), start=1):
            b = _cube_around(p, eps / 2 ** (m + 1))
            boxes.append(b)
            total += box_measure(b)
        # sum_{m > n} eps/2^(m+1) = eps/2^(n+1)
        tail = eps / 2 ** (len(boxes) + 1)
        return Cover(tuple(boxes), total, tail)

    def points(self, n: int) -> list[tuple]:
        return list(itertools.islice(self.generate(), n))

    def contains(self, x) -> bool | None:
        return self.member(x) if self.member is not None else None

    def __repr__(self) -> str:
        return f"EnumerableSequence({self.label})"


def _rationals_in(box: Box) -> Iterator[tuple]:
    """Points of Q^d in ``box`` ordered by common denominator, then numerators."""
    for q in itertools.count(1):
        ranges = []
        for a, b in zip(box.lo, box.hi):
            lo = int((a * q) // 1) + 1
            hi = -int((-b * q) // 1) - 1
            ranges.append(range(lo, hi + 1))
        for nums in itertools.product(*ranges):
            g = q
            for n in nums:
                g = gcd(g, n)
            if g == 1:
                yield tuple(Fraction(n, q) for n in nums)


def rationals_in(box: Box) -> EnumerableSequence:
    """Certificate for ``Q^d`` intersected with a bounded box."""
    if not box.is_bounded:
        raise ValueError("rational enumeration needs a bounded box")

    def member(x):
        try:
            xt = tuple(Fraction(c) for c in x)
        except (TypeError, ValueError):
            return None
        return box.contains_point(xt)

    return EnumerableSequence(lambda: _rationals_in(box), box.dim, f"Q^{box.dim} in {box}", member)


@dataclass(frozen=True)
class BoxBoundary(NullCertificate):
    box: Box

    @property
    def dim(self) -> int:
        return self.box.dim

    def face_slabs(self, allowance: Fraction) -> list[Box]:
        """Open slabs of common dyadic thickness around each of the 2d faces."""
        b = self.box
        if b.is_empty:
            return []
        if not b.is_bounded:
            raise ValueError("boundary certificates need a bounded box")
        d = b.dim
        per_face = allowance / (2 * d)
        w = b.widths()
        t = Fraction(1)
        while True:
            biggest = max(
                t * _prod(w[j] + t for j in range(d) if j != i) for i in range(d)
            )
            if biggest <= per_face:
                break
            t /= 2
        out = []
        for i in range(d):
            for v in (b.lo[i], b.hi[i]):
                lo = tuple(v - t / 2 if j == i else b.lo[j] - t / 2 for j in range(d))
                hi = tuple(v + t / 2 if j == i else b.hi[j] + t / 2 for j in range(d))
                out.append(Box(lo, hi))
        return out

    def cover_for(self, eps, budget: int = 1000) -> Cover:
        eps = Fraction(eps)
        if eps <= 0 or budget < 1:
            raise ValueError("need eps > 0 and budget >= 1")
        slabs = self.face_slabs(eps / 2)
        emitted = slabs[:budget]
        total = sum((box_measure(s) for s in emitted), Fraction(0))
        tail = sum((box_measure(s) for s in slabs[budget:]), Fraction(0))
        return Cover(tuple(emitted), total, tail)

    def contains(self, x) -> bool:
        b = self.box
        inside_closed = all(a <= xi <= c for a, xi, c in zip(b.lo, x, b.hi))
        return inside_closed and not b.contains_point(x)


def _prod(it) -> Fraction:
    out = Fraction(1)
    for v in it:
        out *= v
    return out


@dataclass(frozen=True)
class CountableUnion(NullCertificate):
    """Union of certificates; member ``n`` (0-based) is covered within ``eps/2**(n+1)``.

    ``members`` is either a finite sequence or a zero-argument callable that
    returns a fresh (possibly infinite) iterator of certificates.
    """

    members: object
    dim: int

    def _iter(self) -> Iterator[NullCertificate]:
        if callable(self.members):
            return iter(self.members())
        return iter(self.members)

    @property
    def is_finite(self) -> bool:
        return not callable(self.members)

    def cover_for(self, eps, budget: int = 1000) -> Cover:
        eps = Fraction(eps)
        if eps <= 0 or budget < 1:
            raise ValueError("need eps > 0 and budget >= 1")
        boxes: list[Box] = []
        emitted = Fraction(0)
        tail = Fraction(0)
        visited = 0
        exhausted = True
        for n, cert in enumerate(self._iter()):
            if len(boxes) >= budget:
                exhausted = False
                break
            c = cert.cover_for(eps / 2 ** (n + 1), budget - len(boxes))
            boxes.extend(c.boxes)
            emitted += c.emitted_measure
            tail += c.tail_bound
            visited = n + 1
        if not exhausted:
            if self.is_finite:
                # finite members left: bound each by its own share
                tail += sum(
                    (eps / 2 ** (n + 1) for n in range(visited, len(self.members))), Fraction(0)
                )
            else:
                tail += eps / 2 ** visited
        return Cover(tuple(boxes), emitted, tail)

    def contains(self, x) -> bool | None:
        if not self.is_finite:
            return None
        answers = [c.contains(x) for c in self.members]
        if any(a is True for a in answers):
            return True
        if all(a is False for a in answers):
            return False
        return None


def union_null(certs, dim: int | None = None) -> CountableUnion:
    """Union of a list (or generator factory) of certificates."""
    if callable(certs):
        if dim is None:
            raise ValueError("dimension required for a generated union")
        return CountableUnion(certs, dim)
    certs = tuple(certs)
    if dim is None:
        dim = certs[0].dim if certs else 1
    return CountableUnion(certs, dim)


def empty_certificate(dim: int = 1) -> CountableUnion:
    return CountableUnion((), dim)
