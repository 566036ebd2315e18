from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.geometry import (
    INF,
    Box,
    BoxUnion,
    DimensionMismatch,
    InfiniteMeasure,
    bisect_box,
    box_measure,
    box_size,
    complement_within,
    difference,
    dyadic,
    format_rational,
    intersect,
    intersect_unions,
    is_dyadic,
    parse_box,
    parse_boxes,
    parse_number,
    subset_ae,
    union_normalize,
)

rationals = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def boxes(draw, dim=2):
    lo, hi = [], []
    for _ in range(dim):
        a, b = draw(rationals), draw(rationals)
        lo.append(min(a, b))
        hi.append(max(a, b))
    return Box(tuple(lo), tuple(hi))


def test_measure_and_size():
    b = Box((0, F(1, 2)), (F(1, 3), 2))
    assert box_measure(b) == F(1, 3) * F(3, 2)
    assert box_size(b) == F(1, 3) + F(3, 2)


def test_degenerate_box_is_empty():
    b = Box((0, 0), (1, 0))
    assert b.is_empty
    assert box_measure(b) == 0
    assert b == Box.empty(2)


def test_unbounded_box():
    b = Box((0,), (INF,))
    assert not b.is_bounded
    with pytest.raises(InfiniteMeasure):
        box_measure(b)


def test_intersect_and_bisect():
    a = Box((0, 0), (1, 1))
    b = Box((F(1, 2), F(-1)), (2, F(1, 4)))
    assert intersect(a, b) == Box((F(1, 2), 0), (1, F(1, 4)))
    left, right = bisect_box(Box((0, 0), (2, 1)))
    assert left == Box((0, 0), (1, 1)) and right == Box((1, 0), (2, 1))


def test_union_normalize_disjoint_measure():
    u = union_normalize([Box((0,), (F(2, 3),)), Box((F(1, 3),), (1,))])
    assert u.is_disjoint()
    assert u.measure() == 1


def test_difference_and_complement():
    u = BoxUnion([Box.unit(2)])
    v = BoxUnion([Box((0, 0), (F(1, 2), F(1, 2)))])
    assert difference(u, v).measure() == F(3, 4)
    assert complement_within(Box.unit(2), v).measure() == F(3, 4)


def test_subset_ae_ignores_boundaries():
    whole = BoxUnion([Box((0,), (1,))])
    halves = union_normalize([Box((0,), (F(1, 2),)), Box((F(1, 2),), (1,))])
    assert subset_ae(whole, halves)
    assert subset_ae(halves, whole)


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatch):
        BoxUnion([Box((0,), (1,)), Box.unit(2)])


def test_parse_number_forms():
    assert parse_number("1/3") == F(1, 3)
    assert parse_number("3/2^4") == F(3, 16)
    assert parse_number("0.25") == F(1, 4)
    assert parse_number("1e-3") == F(1, 1000)
    assert parse_number("-inf") == -INF


def test_parse_box_and_boxes():
    assert parse_box("(0,1)x(1/2,3/4)") == Box((0, F(1, 2)), (1, F(3, 4)))
    assert parse_boxes("(0,1/2)|(1/2,1)").measure() == 1


def test_dyadic_helpers():
    assert dyadic(3, 4) == F(3, 16)
    assert is_dyadic(F(5, 8))
    assert not is_dyadic(F(1, 3))


def test_format_rational():
    assert format_rational(F(1, 3)) == "1/3"
    assert format_rational(2) == "2/1"
    assert format_rational(INF) == "inf"


@given(boxes(), boxes())
def test_inclusion_exclusion(a, b):
    u = union_normalize([a, b], 2)
    assert u.measure() == box_measure(a) + box_measure(b) - box_measure(intersect(a, b))


@given(st.lists(boxes(), max_size=4), st.lists(boxes(), max_size=4))
def test_intersection_difference_split(xs, ys):
    u = union_normalize(xs, 2)
    v = union_normalize(ys, 2)
    assert intersect_unions(u, v).measure() + difference(u, v).measure() == u.measure()


@given(st.lists(boxes(), max_size=5))
def test_normalized_union_is_disjoint(xs):
    u = union_normalize(xs, 2)
    assert u.is_disjoint()
    assert all(subset_ae(BoxUnion([x], 2), u) for x in xs)
