import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.expr import (
    Coord,
    Const,
    DomainError,
    Div,
    Piecewise,
    Pow,
    box_bounds,
    cos,
    evaluate,
    exp,
    factors,
    log,
    sin,
    sqrt,
)
from partint.geometry import Box
from partint.intervals import add_down, add_up, exact_sum, mul_down, mul_up, precision, working_precision

X, Y = Coord(0), Coord(1)
floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(floats, floats)
def test_directed_add_brackets_exact(a, b):
    lo, hi = add_down(np.array([a]), np.array([b])), add_up(np.array([a]), np.array([b]))
    exact = F(a) + F(b)
    assert F(lo[0]) <= exact <= F(hi[0])


@given(floats, floats)
def test_directed_mul_brackets_exact(a, b):
    lo, hi = mul_down(np.array([a]), np.array([b])), mul_up(np.array([a]), np.array([b]))
    exact = F(a) * F(b)
    assert F(lo[0]) <= exact <= F(hi[0])


def test_dyadic_arithmetic_stays_exact():
    a = np.array([0.5, 0.25])
    assert (add_down(a, a) == add_up(a, a)).all()


@given(st.lists(st.floats(min_value=-1e300, max_value=1e300, allow_nan=False), max_size=40))
def test_exact_sum_matches_fraction_sum(vs):
    assert exact_sum(np.array(vs)) == sum((F(v) for v in vs), F(0))


def test_exact_sum_infinities():
    assert exact_sum(np.array([1.0, math.inf])) == math.inf
    with pytest.raises(ValueError):
        exact_sum(np.array([math.inf, -math.inf]))


def test_precision_context():
    assert working_precision() == 53
    with precision(30):
        assert working_precision() == 30
    assert working_precision() == 53
    with pytest.raises(ValueError):
        with precision(20):
            pass


EXPRS = [
    X * X - Y,
    exp(X) * sin(Y),
    cos(X + Y),
    sqrt(X + 1),
    log(X + 2),
    Div(Const(F(1)), X + 1),
    Pow(X - F(1, 2), F(3)),
    X - Y,
]


@pytest.mark.parametrize("e", EXPRS, ids=str)
@given(st.fractions(0, 1, max_denominator=64), st.fractions(0, 1, max_denominator=64),
       st.fractions(F(1, 1000), F(1, 4), max_denominator=1000))
def test_interval_encloses_point_values(e, a, b, w):
    box = Box((a, b), (a + w, b + w))
    lo, hi, bad = evaluate(e, *box_bounds([box]))
    assert not bad
    for t in (F(1, 7), F(1, 2), F(6, 7)):
        v = e.exact((a + t * w, b + t * w))
        # rational values compare exactly; float values are rounded to nearest
        assert F(lo[0]) <= F(v) <= F(hi[0])


def test_division_by_interval_with_zero_flags_offender():
    _, _, bad = evaluate(Div(Const(F(1)), X), np.array([[-1.0]]), np.array([[1.0]]))
    assert bad


def test_log_of_nonpositive_flags_offender():
    _, _, bad = evaluate(log(X), np.array([[-1.0]]), np.array([[1.0]]))
    assert bad


def test_piecewise_step_exact_values():
    pw = Piecewise(((Box((0,), (F(1, 2),)), Const(F(2))),), Const(F(1)))
    assert pw.is_step
    assert pw.exact((F(1, 4),)) == 2
    assert pw.exact((F(3, 4),)) == 1
    lo, hi, _ = evaluate(pw, *box_bounds([Box((F(1, 4),), (F(3, 4),))]))
    assert lo[0] == 1 and hi[0] == 2


def test_factors_flatten_products():
    assert len(factors(X * Y * Const(F(3)))) == 3


def test_domain_error_type():
    assert issubclass(DomainError, ArithmeticError)
