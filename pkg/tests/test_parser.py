from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.funcrep import eval_point
from partint.measure import measure_enclosure
from partint.parser import ParseError, parse_expr, parse_function, parse_set


def test_precedence_and_power():
    e = parse_expr("1 + 2*x^2 - -x")
    assert e.exact((F(1, 2),)) == 1 + F(1, 2) + F(1, 2)


def test_named_variables():
    f = parse_function("f(s,t) = s*t + 1", "(0,1)x(0,1)")
    assert eval_point(f, (F(1, 2), F(1, 2))) == F(5, 4)


def test_number_forms_fold_exactly():
    e = parse_expr("1/3 + 3/2^4 + 0.25")
    assert e.exact(()) == F(1, 3) + F(3, 16) + F(1, 4)


def test_functions_parse():
    e = parse_expr("exp(x) + log(x) + sin(x) + cos(x) + sqrt(x) + abs(x) + min(x, 1) + max(x, 0)")
    assert e.coords() == frozenset({0})


def test_piecewise():
    f = parse_function("piecewise { (0,1/2): 2; (1/2,1): 1 }", "(0,1)")
    assert f.core.is_step
    assert eval_point(f, (F(1, 4),)) == 2


def test_dirichlet_clause():
    f = parse_function("0 null_modify(rationals, 1)", "(0,1)")
    assert eval_point(f, (F(1, 2),)) == 1
    assert len(f.modifications) == 1


def test_points_clause():
    f = parse_function("x null_modify(points[(1/2)], 7)", "(0,1)")
    assert eval_point(f, (F(1, 2),)) == 7
    assert eval_point(f, (F(1, 4),)) == F(1, 4)


def test_sets():
    assert measure_enclosure(parse_set("box (0,1)x(0,1)")).inner == 1
    assert measure_enclosure(parse_set("box (0,1/2)|(1/4,1)")).outer == 1
    assert measure_enclosure(parse_set("complement((0,2), box (0,1))")).inner == 1
    assert measure_enclosure(parse_set("union(box (0,1/4), box (3/4,1))")).inner == F(1, 2)
    assert measure_enclosure(parse_set("nullmod(box (0,1), rationals)")).inner == 1
    assert measure_enclosure(parse_set("null(rationals in (0,1))")).outer == 0
    assert measure_enclosure(parse_set("box (0,1) & box (1/2,2)")).inner == F(1, 2)


def test_level_set_parse():
    e = measure_enclosure(parse_set("level x^2 + y^2 < 1 in (-1,1)x(-1,1)"), F(1, 20))
    assert e.inner <= F(314, 100) <= e.outer


@pytest.mark.parametrize("text,where", [
    ("x^+", 2),
    ("x + foo", 4),
    ("x^y", 2),
    ("(x + 1", 6),
    ("1/0", 2),
])
def test_errors_carry_spans(text, where):
    with pytest.raises(ParseError) as info:
        parse_function(text, "(0,1)x(0,1)")
    assert info.value.start == where
    assert "^" in info.value.render()


def test_too_many_variables():
    with pytest.raises(ParseError):
        parse_function("x + y", "(0,1)")


def test_bad_set():
    with pytest.raises(ParseError):
        parse_set("ball (0,1)")


@given(st.fractions(min_value=-100, max_value=100, max_denominator=1000))
def test_rational_literal_roundtrip(q):
    assert parse_expr(f"{q.numerator}/{q.denominator}").exact(()) == q
