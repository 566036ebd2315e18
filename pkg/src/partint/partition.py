"""Finite a.e.-partitions of open sets into disjoint open boxes.

Countable partitions are truncated to a finite list of cells plus an exact
bound on the measure of whatever part of the target has not been tiled yet.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import (
    Box,
    BoxUnion,
    bisect_box,
    box_measure,
    difference,
    intersect,
    union_normalize,
)
from .nullset import BoxBoundary, NullCertificate, union_null


class PartitionMismatch(ValueError):
    """Two partitions do not cover the same set up to a null set."""


@dataclass(frozen=True)
class Remainder:
    region: BoxUnion  # superset of the untiled part of the target
    bound: Fraction  # exact upper bound on the measure of the untiled part


@dataclass(frozen=True)
class Partition:
    cells: tuple
    target: BoxUnion
    boundary_null: NullCertificate = field(compare=False, repr=False)
    remainder: Remainder | None = None
    stages: tuple = ()

    @classmethod
    def from_cells(cls, cells: Sequence[Box], target: BoxUnion | None = None) -> "Partition":
        cells = tuple(c for c in cells if not c.is_empty)
        dim = cells[0].dim if cells else (target.dim if target is not None else 1)
        if target is None:
            target = union_normalize(cells, dim)
        p = cls(cells, target, union_null([BoxBoundary(c) for c in cells], dim))
        if not p.is_disjoint():
            raise ValueError("partition cells overlap")
        return p

    @property
    def dim(self) -> int:
        return self.target.dim

    @property
    def remainder_bound(self) -> Fraction:
        return self.remainder.bound if self.remainder is not None else Fraction(0)

    def measure(self) -> Fraction:
        return sum((box_measure(c) for c in self.cells), Fraction(0))

    def max_size(self) -> Fraction:
        return max((sum(c.widths(), Fraction(0)) for c in self.cells), default=Fraction(0))

    def is_disjoint(self) -> bool:
        return not any(True for _ in _overlapping_pairs(self.cells, self.cells, strict_upper=True))

    def __len__(self) -> int:
        return len(self.cells)


def _cube(index: Sequence[int], n: int) -> Box:
    s = Fraction(1, 1 << n)
    return Box(tuple(m * s for m in index), tuple((m + 1) * s for m in index))


def _overlap_measure(cube: Box, target: BoxUnion) -> Fraction:
    return sum((box_measure(intersect(cube, b)) for b in target), Fraction(0))


def decompose_open(
    target: BoxUnion,
    scale: int = 0,
    budget: int = 1 << 16,
    window: Box | None = None,
    max_stages: int = 40,
) -> Partition:
    """Greedy dyadic decomposition of an open box union.

    Stage 0 admits every dyadic cube of side ``2**-scale`` inside the target;
    stage ``l`` admits the cubes of side ``2**-(scale+l)`` inside the part not
    yet covered.  Stops when nothing is left, when the next stage could push
    the cell count past ``budget``, or after ``max_stages`` stages; the cubes
    still straddling the target boundary then form the remainder.
    """
    dim = target.dim
    if window is not None:
        target = union_normalize([intersect(b, window) for b in target], dim)
    else:
        target = union_normalize(list(target), dim)
    if any(not b.is_bounded for b in target):
        raise ValueError("unbounded target: supply an exhaustion window")
    if target.is_empty:
        return Partition((), target, union_null([], dim))

    bbox = target.bounding_box()
    n = scale
    ranges = []
    for a, b in zip(bbox.lo, bbox.hi):
        lo = (a * (1 << n)).__floor__()
        hi = (b * (1 << n)).__ceil__()
        ranges.append(range(lo, hi))
    candidates = list(itertools.product(*ranges))

    cells: list[Box] = []
    stages: list[int] = []
    partial: list[tuple[tuple, Fraction]] = []
    for stage in range(max_stages):
        partial = []
        for idx in candidates:
            cube = _cube(idx, n)
            inside = _overlap_measure(cube, target)
            if inside == 0:
                continue
            if inside == box_measure(cube):
                cells.append(cube)
                stages.append(stage)
            else:
                partial.append((idx, inside))
        if not partial:
            break
        n_children = len(partial) << dim
        if len(cells) + n_children > budget or stage == max_stages - 1:
            break
        n += 1
        candidates = sorted(
            tuple(2 * m + o for m, o in zip(idx, offs))
            for idx, _ in partial
            for offs in itertools.product((0, 1), repeat=dim)
        )

    remainder = None
    if partial:
        region = BoxUnion([_cube(idx, n) for idx, _ in partial], dim)
        remainder = Remainder(region, sum((m for _, m in partial), Fraction(0)))
    cert = union_null([BoxBoundary(c) for c in cells], dim)
    return Partition(tuple(cells), target, cert, remainder, tuple(stages))


def _overlapping_pairs(ps: Sequence[Box], qs: Sequence[Box], strict_upper: bool = False):
    """Yield ``(i, j, p_i & q_j)`` for nonempty intersections, in (i, j) order."""
    if not ps or not qs:
        return
    order = sorted(range(len(qs)), key=lambda j: qs[j].lo[0])
    los = [qs[j].lo[0] for j in order]
    wmax = max(q.hi[0] - q.lo[0] for q in qs)
    for i, p in enumerate(ps):
        start = bisect.bisect_right(los, p.lo[0] - wmax)
        stop = bisect.bisect_left(los, p.hi[0])
        js = sorted(order[start:stop])
        for j in js:
            if strict_upper and j <= i:
                continue
            cut = intersect(p, qs[j])
            if not cut.is_empty:
                yield i, j, cut


def _covered(p: Partition) -> BoxUnion:
    boxes = list(p.cells)
    if p.remainder is not None:
        boxes += list(p.remainder.region)
    return union_normalize(boxes, p.dim)


def common_refinement(p: Partition, q: Partition) -> Partition:
    """All nonempty pairwise intersections ``p_i & q_j`` in (i, j) order."""
    if p.dim != q.dim:
        raise PartitionMismatch("dimension mismatch")
    tp, tq = p.target, q.target
    if difference(tp, tq).measure() != 0 or difference(tq, tp).measure() != 0:
        raise PartitionMismatch("partitions have different targets")
    cells = tuple(cut for _, _, cut in _overlapping_pairs(p.cells, q.cells))
    remainder = None
    if p.remainder is not None or q.remainder is not None:
        parts = [r for r in (p.remainder, q.remainder) if r is not None]
        region = union_normalize([b for r in parts for b in r.region], p.dim)
        # untiled part of the refinement lies in the union of both untiled parts
        remainder = Remainder(region, sum((r.bound for r in parts), Fraction(0)))
    cert = union_null([p.boundary_null, q.boundary_null], p.dim)
    return Partition(cells, p.target, cert, remainder)


def bisect_cell(p: Partition, index: int) -> Partition:
    """Replace one cell by its halves along its longest axis."""
    if not 0 <= index < len(p.cells):
        raise IndexError(f"cell index {index} out of range for {len(p.cells)} cells")
    left, right = bisect_box(p.cells[index])
    cells = p.cells[:index] + (left, right) + p.cells[index + 1:]
    stages = p.stages
    if stages:
        stages = stages[:index] + (stages[index],) * 2 + stages[index + 1:]
    cert = union_null([p.boundary_null, BoxBoundary(left)], p.dim)
    return Partition(cells, p.target, cert, p.remainder, stages)
