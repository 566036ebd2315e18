from fractions import Fraction as F

import pytest

from partint.expr import Coord, Const, DomainError, Div, Pow, Sub
from partint.funcrep import (
    OutsideDomain,
    certify_nonnegative,
    dirichlet,
    ess_inf,
    ess_sup,
    eval_point,
    function,
    pos_neg_split,
    range_enclosure,
)
from partint.geometry import Box
from partint.nullset import FinitePoints

X = Coord(0)
UNIT = Box((0,), (1,))


def test_range_enclosure_of_square():
    r = range_enclosure(function(Pow(X, F(2)), UNIT), Box((F(1, 2),), (1,)))
    assert r.lo == F(1, 4) and r.hi == 1


def test_range_outside_domain():
    with pytest.raises(OutsideDomain):
        range_enclosure(function(X, UNIT), Box((0,), (2,)))


def test_range_domain_violation():
    with pytest.raises(DomainError):
        range_enclosure(function(Div(Const(F(1)), Sub(X, F(1, 2))), UNIT), UNIT)


def test_dirichlet_point_values_and_ess_bounds():
    f = dirichlet()
    assert eval_point(f, (F(1, 2),)) == 1
    e = ess_inf(f, UNIT, F(1, 10**6))
    assert (e.lo, e.hi) == (0, 0)
    s = ess_sup(f, UNIT, F(1, 10**6))
    assert (s.lo, s.hi) == (0, 0)


def test_modification_ignored_by_essential_bounds():
    f = function(X, UNIT).modified(FinitePoints(((F(1, 2),),), 1), 100)
    assert eval_point(f, (F(1, 2),)) == 100
    s = ess_sup(f, UNIT, F(1, 1000))
    assert s.hi <= 1 + F(1, 1000)


def test_ess_inf_of_square_converges():
    e = ess_inf(function(Pow(X, F(2)), UNIT), Box((F(1, 2),), (1,)), F(1, 10**6))
    assert e.lo <= F(1, 4) <= e.hi
    assert e.width <= F(1, 10**6)
    assert e.converged


def test_pos_neg_split_recombines():
    f = function(Sub(X, F(1, 2)), UNIT)
    plus, minus = pos_neg_split(f)
    for x in (F(1, 8), F(1, 2), F(7, 8)):
        assert eval_point(plus, (x,)) - eval_point(minus, (x,)) == eval_point(f, (x,))
        assert eval_point(plus, (x,)) >= 0 and eval_point(minus, (x,)) >= 0


def test_certify_nonnegative():
    assert certify_nonnegative(function(Pow(Sub(X, F(1, 3)), F(2)), UNIT))
    assert not certify_nonnegative(function(Sub(X, F(1, 2)), UNIT))


def test_point_outside_domain():
    with pytest.raises(OutsideDomain):
        eval_point(function(X, UNIT), (F(2),))
