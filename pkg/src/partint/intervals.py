"""Vectorised outward-rounded interval arithmetic on float64 arrays.

Every interval is a pair ``(lo, hi)`` of equally shaped numpy arrays.  The
basic operations (+, -, *, /, integer powers, sqrt) use error-free
transformations to detect whether the rounded result is exact and only step
outward by one ulp when it is not, so dyadic inputs stay exact.  Library
functions (exp, log, sin, cos, real powers) are widened by a relative margin
tied to the working precision.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1
_TINY = 2.0 ** -1074
_SAFE_MAX = 2.0 ** 995
_SAFE_MIN = 2.0 ** -960

_precision_bits = 53
_ULPS = 4


def working_precision() -> int:
    return _precision_bits


@contextlib.contextmanager
def precision(bits: int):
    """Temporarily change the precision used to widen library functions."""
    global _precision_bits
    if bits < 24 or bits > 53:
        raise ValueError("working precision must be between 24 and 53 bits")
    old = _precision_bits
    _precision_bits = bits
    try:
        yield
    finally:
        _precision_bits = old


def _rel() -> float:
    return _ULPS * 2.0 ** -_precision_bits


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


# -- error-free transformations ------------------------------------------------


def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def add_down(a, b):
    with np.errstate(invalid="ignore", over="ignore"):
        s, e = two_sum(a, b)
        out = np.where(e < 0, _down(s), s)
        out = np.where(np.isfinite(s), out, np.where(np.isnan(s), -np.inf, s))
        # overflow to +inf from finite operands: largest float is a valid lower bound
        out = np.where(np.isposinf(s) & np.isfinite(a) & np.isfinite(b), np.finfo(float).max, out)
    return out


def add_up(a, b):
    return -add_down(-a, -b)


def sub_down(a, b):
    return add_down(a, -b)


def sub_up(a, b):
    return add_up(a, -b)


def mul_down(a, b):
    with np.errstate(invalid="ignore", over="ignore", under="ignore"):
        p, e = two_prod(a, b)
        risky = (np.abs(a) > _SAFE_MAX) | (np.abs(b) > _SAFE_MAX) | (
            (np.abs(p) < _SAFE_MIN) & (a != 0) & (b != 0)
        )
        out = np.where(e < 0, _down(p), p)
        out = np.where(risky & np.isfinite(p), _down(p), out)
        # 0 * inf in an endpoint product stands for 0
        out = np.where(np.isnan(p), 0.0, out)
        out = np.where(np.isposinf(p) & np.isfinite(a) & np.isfinite(b), np.finfo(float).max, out)
    return out


def mul_up(a, b):
    return -mul_down(-a, b)


def recip_down(x):
    """Lower bound of 1/x for nonzero finite x (0 and inf handled by callers)."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        r = 1.0 / x
        p, e = two_prod(r, x)
        resid = (p - 1.0) + e
        above = resid * np.sign(x) > 0
        risky = (np.abs(x) > _SAFE_MAX) | (np.abs(x) < _SAFE_MIN)
        out = np.where(above | risky, _down(r), r)
        out = np.where(np.isinf(x), 0.0, out)
    return out


def recip_up(x):
    return -recip_down(-x)


# -- interval operations ---------------------------------------------------------


def const(q, shape) -> tuple:
    """Tightest float interval around an exact rational."""
    q = Fraction(q)
    f = float(q)
    lo = f if Fraction(f) <= q else math.nextafter(f, -math.inf)
    hi = f if Fraction(f) >= q else math.nextafter(f, math.inf)
    return np.full(shape, lo), np.full(shape, hi)


def iadd(x, y):
    return add_down(x[0], y[0]), add_up(x[1], y[1])


def isub(x, y):
    return sub_down(x[0], y[1]), sub_up(x[1], y[0])


def ineg(x):
    return -x[1], -x[0]


def imul(x, y):
    a, b = x
    c, d = y
    lo = np.minimum(np.minimum(mul_down(a, c), mul_down(a, d)), np.minimum(mul_down(b, c), mul_down(b, d)))
    hi = np.maximum(np.maximum(mul_up(a, c), mul_up(a, d)), np.maximum(mul_up(b, c), mul_up(b, d)))
    return lo, hi


def irecip(y):
    """Reciprocal; returns ``(lo, hi, violation)``.

    A denominator touching zero at one endpoint yields an unbounded side (the
    boxes are open, so the endpoint itself is never attained).  A denominator
    straddling zero, or identically zero, is a domain violation and gets the
    whole real line.
    """
    c, d = y
    bad = ((c < 0) & (d > 0)) | ((c == 0) & (d == 0))
    lo = np.where(d == 0, -np.inf, recip_down(np.where(d == 0, 1.0, d)))
    hi = np.where(c == 0, np.inf, recip_up(np.where(c == 0, 1.0, c)))
    lo = np.where(bad, -np.inf, lo)
    hi = np.where(bad, np.inf, hi)
    return lo, hi, bad


def idiv(x, y):
    lo, hi, bad = irecip(y)
    q = imul(x, (lo, hi))
    return np.where(bad, -np.inf, q[0]), np.where(bad, np.inf, q[1]), bad


def iabs(x):
    a, b = x
    lo = np.where(a >= 0, a, np.where(b <= 0, -b, 0.0))
    hi = np.maximum(np.abs(a), np.abs(b))
    return lo, hi


def imin(x, y):
    return np.minimum(x[0], y[0]), np.minimum(x[1], y[1])


def imax(x, y):
    return np.maximum(x[0], y[0]), np.maximum(x[1], y[1])


def _pow_nonneg(x, n: int, mul):
    result = np.ones_like(x)
    base = x
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def ipow_int(x, n: int):
    """Integer power with the sign structure of x**n taken into account."""
    a, b = x
    if n == 0:
        return np.ones_like(a), np.ones_like(a), np.zeros(a.shape, bool)
    if n < 0:
        lo, hi, _ = ipow_int(x, -n)
        r = irecip((lo, hi))
        return r
    pd = lambda v: _pow_nonneg(v, n, mul_down)
    pu = lambda v: _pow_nonneg(v, n, mul_up)
    with np.errstate(over="ignore", invalid="ignore"):
        if n % 2:
            lo = np.where(a >= 0, pd(np.abs(a)), -pu(np.abs(a)))
            hi = np.where(b >= 0, pu(np.abs(b)), -pd(np.abs(b)))
        else:
            lo = np.where(a >= 0, pd(np.abs(a)), np.where(b <= 0, pd(np.abs(b)), 0.0))
            hi = pu(np.maximum(np.abs(a), np.abs(b)))
    return lo, hi, np.zeros(a.shape, bool)


def _widen_down(v):
    with np.errstate(invalid="ignore", over="ignore"):
        return _down(v - np.abs(v) * _rel() - _TINY)


def _widen_up(v):
    with np.errstate(invalid="ignore", over="ignore"):
        return _up(v + np.abs(v) * _rel() + _TINY)


def isqrt(x):
    a, b = x
    bad = b < 0
    a0 = np.maximum(a, 0.0)
    b0 = np.maximum(b, 0.0)

    def directed(v, down: bool):
        with np.errstate(invalid="ignore", over="ignore", under="ignore"):
            r = np.sqrt(v)
            p, e = two_prod(r, r)
            resid = (p - v) + e
            risky = (v > _SAFE_MAX) | ((v < _SAFE_MIN) & (v > 0))
            if down:
                out = np.where((resid > 0) | risky, _down(r), r)
                return np.maximum(out, 0.0)
            out = np.where((resid < 0) | risky, _up(r), r)
            return np.where(np.isinf(v), np.inf, out)

    lo = directed(a0, True)
    hi = directed(b0, False)
    # part of the box below zero is outside the function's domain
    bad = bad | (a < 0)
    return np.where(b < 0, -np.inf, lo), np.where(b < 0, np.inf, hi), bad


def ipow_real(x, p: Fraction):
    """``x**p`` for a non-integer rational ``p``, defined on ``x >= 0``."""
    a, b = x
    bad = a < 0
    a0 = np.maximum(a, 0.0)
    b0 = np.maximum(b, 0.0)
    pf = float(p)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        va = np.power(a0, pf)
        vb = np.power(b0, pf)
    exact_a = (a0 == 0) | (a0 == 1) | np.isinf(a0)
    exact_b = (b0 == 0) | (b0 == 1) | np.isinf(b0)
    if pf > 0:
        lo = np.where(exact_a, va, np.maximum(_widen_down(va), 0.0))
        hi = np.where(exact_b, vb, _widen_up(vb))
    else:
        lo = np.where(exact_b, vb, np.maximum(_widen_down(vb), 0.0))
        hi = np.where(exact_a, va, _widen_up(va))
    lo = np.where(b < 0, -np.inf, lo)
    hi = np.where(b < 0, np.inf, hi)
    return lo, hi, bad


def iexp(x):
    a, b = x
    with np.errstate(over="ignore"):
        ea, eb = np.exp(a), np.exp(b)
    lo = np.where(a == 0, 1.0, np.maximum(_widen_down(ea), 0.0))
    hi = np.where(b == 0, 1.0, np.where(np.isinf(eb), np.inf, _widen_up(eb)))
    return lo, hi


def ilog(x):
    a, b = x
    bad = (b <= 0) | (a < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.log(np.maximum(a, 0.0))
        lb = np.log(np.maximum(b, 0.0))
    lo = np.where(a <= 0, -np.inf, np.where(a == 1, 0.0, _widen_down(la)))
    hi = np.where(b == 1, 0.0, _widen_up(lb))
    hi = np.where(np.isinf(b), np.inf, hi)
    lo = np.where(bad, -np.inf, lo)
    hi = np.where(bad, np.inf, hi)
    return lo, hi, bad


_TWO_PI = 2 * math.pi


def _contains_phase(a, b, phase):
    """Whether [a, b] may contain ``phase + 2*k*pi`` for some integer k."""
    slack = (np.maximum(np.abs(a), np.abs(b)) + 1.0) * 1e-15
    with np.errstate(invalid="ignore"):
        k = np.ceil((a - slack - phase) / _TWO_PI)
        return k * _TWO_PI + phase <= b + slack


def _trig(x, fn, max_phase, min_phase, value_at_zero):
    a, b = x

    def bounds(v):
        fv = fn(v)
        return (np.where(v == 0, value_at_zero, _widen_down(fv)),
                np.where(v == 0, value_at_zero, _widen_up(fv)))

    la, ha = bounds(a)
    lb, hb = bounds(b)
    lo = np.minimum(la, lb)
    hi = np.maximum(ha, hb)
    full = ~np.isfinite(a) | ~np.isfinite(b) | (b - a >= _TWO_PI)
    lo = np.where(full | _contains_phase(a, b, min_phase), -1.0, lo)
    hi = np.where(full | _contains_phase(a, b, max_phase), 1.0, hi)
    return np.clip(lo, -1.0, 1.0), np.clip(hi, -1.0, 1.0)


def isin(x):
    return _trig(x, np.sin, math.pi / 2, -math.pi / 2, 0.0)


def icos(x):
    return _trig(x, np.cos, 0.0, math.pi, 1.0)


# -- exact summation -------------------------------------------------------------


def exact_sum(values) -> Fraction | float:
    """Exact rational sum of a float array (``inf`` if any term is infinite)."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        return Fraction(0)
    if np.isnan(v).any():
        raise ValueError("NaN in exact_sum")
    if np.isinf(v).any():
        pos, neg = np.isposinf(v).any(), np.isneginf(v).any()
        if pos and neg:
            raise ValueError("inf - inf in exact_sum")
        return math.inf if pos else -math.inf
    v = v[v != 0]
    if v.size == 0:
        return Fraction(0)
    mant, expo = np.frexp(v)
    ints = np.ldexp(mant, 53).astype(np.int64)
    order = np.argsort(expo, kind="stable")
    expo = expo[order]
    ints = ints[order]
    starts = np.flatnonzero(np.r_[True, expo[1:] != expo[:-1]])
    hi_part = np.add.reduceat(ints >> 26, starts)
    lo_part = np.add.reduceat(ints & ((1 << 26) - 1), starts)
    emin = int(expo[0]) - 53
    total = 0
    for h, l, e in zip(hi_part.tolist(), lo_part.tolist(), expo[starts].tolist()):
        total += ((h << 26) + l) << (int(e) - 53 - emin)
    if emin >= 0:
        return Fraction(total << emin)
    return Fraction(total, 1 << -emin)
