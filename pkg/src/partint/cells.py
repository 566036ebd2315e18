"""Array-backed affine-dyadic cells shared by the integrator and the paver.

Cell ``i`` lives in base box ``base[i]``; along axis ``j`` it covers
``lo_j + width_j * [k[i,j], k[i,j]+1] / 2**lev[i,j]`` of that box.  Float
bounds are computed with directed rounding so they always contain the exact
cell; for dyadic base boxes they are exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .expr import _float_down, _float_up
from .geometry import Box, box_measure
from .intervals import add_down, add_up, exact_sum, mul_down, mul_up

MAX_LEVEL = 50


def _odd_split(q: Fraction) -> tuple[Fraction, int]:
    """``q = r * 2**e`` with ``r`` having odd numerator and denominator."""
    num, den, e = q.numerator, q.denominator, 0
    if num == 0:
        return Fraction(0), 0
    while num % 2 == 0:
        num //= 2
        e += 1
    while den % 2 == 0:
        den //= 2
        e -= 1
    return Fraction(num, den), e


class Bases:
    """Base boxes with float outer bounds and exact measures split as ``r * 2**e``."""

    def __init__(self, boxes):
        self.boxes = list(boxes)
        if not self.boxes:
            raise ValueError("no base boxes")
        if any(not b.is_bounded for b in self.boxes):
            raise ValueError("base boxes must be bounded")
        self.dim = self.boxes[0].dim
        self.lo_dn = np.array([[_float_down(v) for v in b.lo] for b in self.boxes])
        self.lo_up = np.array([[_float_up(v) for v in b.lo] for b in self.boxes])
        widths = [b.widths() for b in self.boxes]
        self.w_dn = np.array([[_float_down(v) for v in w] for w in widths])
        self.w_up = np.array([[_float_up(v) for v in w] for w in widths])
        self.measures = [box_measure(b) for b in self.boxes]
        factors: dict = {}
        self.exp2 = np.zeros(len(self.boxes), dtype=np.int64)
        self.group = np.zeros(len(self.boxes), dtype=np.int64)
        for i, m in enumerate(self.measures):
            r, e = _odd_split(m)
            self.exp2[i] = e
            self.group[i] = factors.setdefault(r, len(factors))
        self.factors = [None] * len(factors)
        for r, g in factors.items():
            self.factors[g] = r
        self.factor_float = np.array([float(r) for r in self.factors])

    def __len__(self):
        return len(self.boxes)


class Cells:
    def __init__(self, base, lev, k):
        self.base = base
        self.lev = lev
        self.k = k

    def __len__(self):
        return len(self.base)

    @classmethod
    def initial(cls, nbases: int, dim: int, scale: int = 0) -> "Cells":
        per = 1 << scale
        idx = np.array(list(itertools.product(range(per), repeat=dim)), dtype=np.int64).reshape(-1, dim)
        base = np.repeat(np.arange(nbases, dtype=np.int64), len(idx))
        k = np.tile(idx, (nbases, 1))
        lev = np.full_like(k, scale)
        return cls(base, lev, k)

    def take(self, sel) -> "Cells":
        return Cells(self.base[sel], self.lev[sel], self.k[sel])

    @property
    def total_level(self):
        return self.lev.sum(axis=1)

    def bounds(self, bases: Bases):
        t_lo = np.ldexp(self.k.astype(float), -self.lev)
        t_hi = np.ldexp((self.k + 1).astype(float), -self.lev)
        b = self.base
        lo = add_down(bases.lo_dn[b], mul_down(bases.w_dn[b], t_lo))
        hi = add_up(bases.lo_up[b], mul_up(bases.w_up[b], t_hi))
        return lo, hi

    def log2_measure(self, bases: Bases):
        """Per-cell ``e`` with ``|cell| = factor[group] * 2**e``."""
        return bases.exp2[self.base] - self.total_level

    def split_axis(self, bases: Bases):
        """Longest axis of each cell, lowest index on ties."""
        w = np.ldexp(bases.w_dn[self.base], -self.lev)
        w = np.where(self.lev >= MAX_LEVEL, -1.0, w)
        return np.argmax(w, axis=1)

    def splittable(self):
        return (self.lev < MAX_LEVEL).any(axis=1)

    def children(self, axis):
        """Left and right halves of every cell along ``axis`` (one per cell)."""
        rows = np.arange(len(self.base))
        lev = self.lev.copy()
        lev[rows, axis] += 1
        kl = self.k.copy()
        kl[rows, axis] *= 2
        kr = kl.copy()
        kr[rows, axis] += 1
        return Cells(self.base, lev, kl), Cells(self.base.copy(), lev.copy(), kr)

    def boxes(self, bases: Bases) -> list[Box]:
        out = []
        for b, lev, k in zip(self.base.tolist(), self.lev.tolist(), self.k.tolist()):
            bb = bases.boxes[b]
            lo, hi = [], []
            for j in range(bases.dim):
                w = bb.hi[j] - bb.lo[j]
                lo.append(bb.lo[j] + w * Fraction(k[j], 1 << lev[j]))
                hi.append(bb.lo[j] + w * Fraction(k[j] + 1, 1 << lev[j]))
            out.append(Box(tuple(lo), tuple(hi)))
        return out


def interleave(parent: Cells, sel: np.ndarray, left: Cells, right: Cells, *arrays):
    """Replace each selected parent by its two children, keeping cell order.

    ``arrays`` are triples ``(parent_values, left_values, right_values)``;
    returns the new :class:`Cells` followed by the merged arrays.
    """
    n = len(parent)
    counts = np.where(sel, 2, 1)
    src = np.repeat(np.arange(n), counts)
    starts = np.cumsum(counts) - counts
    first = starts[sel]
    second = first + 1

    def merge(p, l, r):
        out = p[src].copy()
        out[first] = l
        out[second] = r
        return out

    cells = Cells(merge(parent.base, left.base, right.base),
                  merge(parent.lev, left.lev, right.lev),
                  merge(parent.k, left.k, right.k))
    return (cells,) + tuple(merge(*a) for a in arrays)


def grouped_exact_sum(values: np.ndarray, exp2: np.ndarray, group: np.ndarray, factors) -> Fraction | float:
    """Exact ``sum_i factors[group_i] * values_i * 2**exp2_i``."""
    scaled = np.ldexp(values, exp2)
    if len(factors) == 1:
        s = exact_sum(scaled)
        return s * factors[0] if s not in (np.inf, -np.inf) else s
    total = Fraction(0)
    for g in np.unique(group).tolist():
        s = exact_sum(scaled[group == g])
        if s in (np.inf, -np.inf):
            return s
        total += s * factors[g]
    return total

