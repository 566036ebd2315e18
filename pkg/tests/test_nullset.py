from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.geometry import Box, box_measure
from partint.nullset import BoxBoundary, FinitePoints, empty_certificate, rationals_in, union_null


def _covered(cover, x):
    return any(b.contains_point(x) for b in cover.boxes)


@given(st.fractions(min_value=F(1, 10**6), max_value=1))
def test_rationals_cover_is_small(eps):
    c = rationals_in(Box((0,), (1,))).cover_for(eps, budget=200)
    assert c.total_bound <= eps
    assert sum((box_measure(b) for b in c.boxes), F(0)) == c.emitted_measure


def test_rationals_enumeration_starts_small():
    pts = rationals_in(Box((0,), (1,))).points(5)
    assert pts == [(F(1, 2),), (F(1, 3),), (F(2, 3),), (F(1, 4),), (F(3, 4),)]


def test_rationals_membership():
    q = rationals_in(Box((0,), (1,)))
    assert q.contains((F(1, 7),))
    assert not q.contains((F(3, 2),))


def test_finite_points_cover_contains_points():
    pts = FinitePoints(((F(1, 3), F(1, 2)), (F(0), F(1))), 2)
    c = pts.cover_for(F(1, 100))
    assert c.total_bound <= F(1, 100)
    assert c.tail_bound == 0
    assert all(_covered(c, p) for p in pts.points)


def test_box_boundary_cover():
    b = Box.unit(2)
    c = BoxBoundary(b).cover_for(F(1, 1000))
    assert c.total_bound <= F(1, 1000)
    assert BoxBoundary(b).contains((F(0), F(1, 2)))
    assert not BoxBoundary(b).contains((F(1, 2), F(1, 2)))


def test_countable_union_budget_split():
    u = union_null([rationals_in(Box((0,), (1,))), FinitePoints(((F(5),),), 1)], 1)
    c = u.cover_for(F(1, 10))
    assert c.total_bound <= F(1, 10)


def test_empty_certificate():
    c = empty_certificate(2).cover_for(F(1, 2))
    assert c.total_bound == 0 and not c.boxes


def test_bad_eps_rejected():
    with pytest.raises(ValueError):
        rationals_in(Box((0,), (1,))).cover_for(0)
