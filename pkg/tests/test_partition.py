import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.geometry import Box, BoxUnion, box_measure, union_normalize
from partint.partition import Partition, PartitionMismatch, bisect_cell, common_refinement, decompose_open


def _grid_partition(cuts_x, cuts_y=None):
    xs = [F(0)] + sorted(set(cuts_x)) + [F(1)]
    if cuts_y is None:
        return Partition.from_cells([Box((a,), (b,)) for a, b in zip(xs, xs[1:])])
    ys = [F(0)] + sorted(set(cuts_y)) + [F(1)]
    cells = [Box((a, c), (b, d)) for a, b in zip(xs, xs[1:]) for c, d in zip(ys, ys[1:])]
    return Partition.from_cells(cells)


cuts = st.lists(st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50), max_size=6)


@pytest.mark.parametrize("d,n", [(1, 0), (1, 3), (2, 2), (2, 4)])
def test_unit_cube_decomposition_counts(d, n):
    p = decompose_open(BoxUnion([Box.unit(d)]), scale=n)
    assert len(p) == 2 ** (d * n)
    assert p.measure() == 1
    assert p.remainder is None


def test_decompose_non_dyadic_target_has_remainder():
    target = BoxUnion([Box((0,), (F(1, 3),))])
    p = decompose_open(target, budget=64)
    assert p.is_disjoint()
    assert p.measure() + p.remainder_bound == F(1, 3)
    assert p.remainder_bound > 0


def test_decompose_stages_grow():
    p = decompose_open(BoxUnion([Box((0,), (F(3, 4),))]))
    assert p.stages == (1, 2)
    assert p.measure() == F(3, 4)


def test_unbounded_target_needs_window():
    from partint.geometry import INF

    with pytest.raises(ValueError):
        decompose_open(BoxUnion([Box((0,), (INF,))]))
    p = decompose_open(BoxUnion([Box((0,), (INF,))]), window=Box((-4,), (4,)))
    assert p.measure() == 4


def test_overlapping_cells_rejected():
    with pytest.raises(ValueError):
        Partition.from_cells([Box((0,), (F(2, 3),)), Box((F(1, 3),), (1,))])


def test_refinement_of_mismatched_targets():
    with pytest.raises(PartitionMismatch):
        common_refinement(_grid_partition([F(1, 2)]), Partition.from_cells([Box((0,), (F(1, 2),))]))


@given(cuts, cuts)
def test_common_refinement_conserves_measure_1d(a, b):
    p, q = _grid_partition(a), _grid_partition(b)
    r = common_refinement(p, q)
    assert r.measure() == 1
    assert r.is_disjoint()
    assert len(r) == len(set(a) | set(b)) + 1


@given(cuts, cuts, cuts, cuts)
def test_common_refinement_conserves_measure_2d(ax, ay, bx, by):
    r = common_refinement(_grid_partition(ax, ay), _grid_partition(bx, by))
    assert r.measure() == 1


def test_bisect_cell_keeps_measure():
    p = _grid_partition([F(1, 3)])
    q = bisect_cell(p, 1)
    assert len(q) == 3 and q.measure() == 1
    with pytest.raises(IndexError):
        bisect_cell(p, 5)


def test_randomized_refinements_seeded():
    rng = random.Random(7)
    for _ in range(20):
        a = [F(rng.randint(1, 15), 16) for _ in range(rng.randint(0, 5))]
        b = [F(rng.randint(1, 8), 9) for _ in range(rng.randint(0, 5))]
        r = common_refinement(_grid_partition(a), _grid_partition(b))
        assert sum((box_measure(c) for c in r.cells), F(0)) == 1
        assert union_normalize(r.cells, 1).measure() == 1
