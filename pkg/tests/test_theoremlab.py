import json
from fractions import Fraction as F

import pytest

from partint.expr import Const, Coord, Mul, Pow, Sub, exp
from partint.funcrep import function
from partint.geometry import Box
from partint.integrate import mimura_integrate, step_integral
from partint.theoremlab import (
    FAIL,
    PASS,
    SequenceSpec,
    alternating_halves,
    check_monotone,
    constant_sequence,
    darboux_sums,
    dct_check,
    fatou_check,
    fubini_check,
    iterated_step_integral,
    layer_cake,
    layer_cake_check,
    load_caratheodory_fixtures,
    mct_check,
    powers,
    riemann_compare,
    run_suite,
    scaled_constant,
    signed_step_fixture,
    sqrt_truncation,
    step_approx,
    step_approx_check,
    suite_report,
    tonelli_check,
    tonelli_step_fixture,
)

X, Y = Coord(0), Coord(1)
UNIT = Box((0,), (1,))


def test_step_approx_of_constant():
    phi = step_approx(function(Const(F(1)), UNIT, True), 1)
    assert step_integral(phi.core, phi.domain) == 1


def test_step_approx_staircase():
    # x on (0,1), n=2: value k/4 on (k/4, (k+1)/4)
    phi = step_approx(function(X, UNIT, True), 2)
    assert step_integral(phi.core, phi.domain) == F(0 + 1 + 2 + 3, 16)
    for k in range(4):
        x = F(2 * k + 1, 8)
        assert phi.core.exact((x,)) == F(k, 4)


def test_step_approx_minorant_and_report():
    f = function(exp(X), UNIT, True)
    integral = mimura_integrate(f, eps=F(1, 1000))
    for n in (1, 2, 3):
        phi = step_approx(f, n)
        assert step_integral(phi.core, phi.domain) <= integral.upper
    assert step_approx_check(function(X, UNIT, True), ns=(1, 2)).status == PASS


def test_layer_cake_of_constant_and_identity():
    lc = layer_cake(function(Const(F(3, 4)), UNIT, True))
    assert lc.lower <= F(3, 4) <= lc.upper
    r = layer_cake_check(function(X, UNIT, True))
    assert r.status == PASS


def test_monotone_sample_check_rejects():
    spec = SequenceSpec("decreasing", lambda n: function(Const(F(1, n)), UNIT, True), (1, 2, 3), monotone=True)
    assert not check_monotone(spec)
    with pytest.raises(ValueError):
        mct_check(spec)


def test_mct_catalogue():
    assert mct_check(sqrt_truncation()).status == PASS
    assert mct_check(scaled_constant()).status == PASS


def test_dct_and_fatou():
    one = function(Const(F(1)), UNIT, True)
    assert dct_check(powers(), one).status == PASS
    r = fatou_check(alternating_halves(), margin=F(1, 4))
    assert r.status == PASS and r.details["certified_gap"] == F(1, 2)
    c = fatou_check(constant_sequence())
    assert c.details["certified_gap"] == 0


def test_dct_rejects_violated_majorant():
    half = function(Const(F(1, 2)), UNIT, True)
    with pytest.raises(ValueError):
        dct_check(powers(), half)


def test_tonelli_step_exact():
    r = tonelli_check(tonelli_step_fixture())
    assert r.status == PASS
    assert r.details["product"] == r.details["inner_y_outer_x"] == F(5, 4)


def test_iterated_integral_of_step():
    core = tonelli_step_fixture().core
    assert iterated_step_integral(core, Box.unit(2), (0,)) == F(5, 4)
    assert iterated_step_integral(core, Box.unit(2), (1,)) == F(5, 4)


def test_fubini_signed_step():
    assert fubini_check(signed_step_fixture()).status == PASS


def test_tonelli_separable():
    r = tonelli_check(function(Mul(X, Y), Box.unit(2), True))
    assert r.status == PASS
    lo, hi = r.details["product"]
    assert lo <= F(1, 4) <= hi


def test_tonelli_rejects_coupled():
    with pytest.raises(ValueError):
        tonelli_check(function(Pow(Sub(X, Y), F(2)), Box.unit(2), True))


def test_darboux_sums_of_constant():
    d = darboux_sums(function(Const(F(2)), UNIT, True), UNIT, 4)
    assert d.lower == (2, 2) and d.upper == (2, 2)


def test_riemann_compare_square():
    r = riemann_compare(function(Pow(X, F(2)), UNIT, True), UNIT, n=8, eps=F(1, 10**5))
    assert r.status == PASS


def test_fixture_file_shape():
    pairs = load_caratheodory_fixtures()
    assert len(pairs) == 50
    assert all(p["E"].startswith("box ") and p["A"] for p in pairs)


def test_reports_serialize_deterministically():
    checks = run_suite("fatou")
    a = json.dumps(suite_report(checks, "fatou"), sort_keys=True)
    b = json.dumps(suite_report(run_suite("fatou"), "fatou"), sort_keys=True)
    assert a == b
    assert '"schema": "mimura-trace/1"' in a
    assert all(c.status != FAIL for c in checks)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
