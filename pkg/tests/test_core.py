import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from frolov import (DomainError, FrolovPolynomial, Kind, evaluate_poly, find_roots,
                    polylog_negative_order, rational_root_sanity)


def sympy_poly(d):
    t = sympy.Symbol("t")
    return t, sympy.expand(sympy.prod([t - (2 * j - 1) for j in range(1, d + 1)]) - 1)


def test_evaluate_examples():
    assert evaluate_poly(FrolovPolynomial(1), 2) == 0
    assert evaluate_poly(FrolovPolynomial(2), 0) == 2
    assert evaluate_poly(FrolovPolynomial(2, Kind.CHEBYSHEV), math.sqrt(2)) == pytest.approx(0, abs=1e-15)


@given(d=st.integers(1, 20), t=st.integers(-10**6, 10**6))
@settings(max_examples=200, deadline=None)
def test_integer_evaluation_is_exact(d, t):
    value = evaluate_poly(FrolovPolynomial(d), t)
    assert isinstance(value, int)
    x, poly = sympy_poly(d)
    assert value == int(poly.subs(x, t))


def test_chebyshev_continuation_matches_trig_form():
    p = FrolovPolynomial(8, "chebyshev")
    for t in np.linspace(-2, 2, 41):
        trig = evaluate_poly(p, float(t))
        rec = evaluate_poly(p, mpmath.mpf(float(t)))
        assert float(rec) == pytest.approx(trig, abs=1e-9)
    # outside [-2, 2]: 2 cosh(d arccosh(t/2))
    assert float(evaluate_poly(p, 3.0)) == pytest.approx(2 * math.cosh(8 * math.acosh(1.5)), rel=1e-12)


def test_chebyshev_requires_power_of_two():
    with pytest.raises(DomainError):
        FrolovPolynomial(3, "chebyshev")
    FrolovPolynomial(1, "chebyshev")


def test_roots_d2_quadratic_formula():
    roots = find_roots(FrolovPolynomial(2)).values
    assert roots == pytest.approx([2 + math.sqrt(2), 2 - math.sqrt(2)], abs=1e-15)


def test_roots_d1():
    assert find_roots(FrolovPolynomial(1)).values.tolist() == [2.0]


def test_roots_chebyshev_d4():
    expected = [2 * math.cos(math.pi * (2 * i - 1) / 8) for i in range(1, 5)]
    assert find_roots(FrolovPolynomial(4, "chebyshev")).values == pytest.approx(expected, abs=1e-15)
    assert find_roots(FrolovPolynomial(4, "chebyshev")).values == pytest.approx(
        [1.847759065, 0.765366865, -0.765366865, -1.847759065], abs=1e-9)


@pytest.mark.parametrize("d", range(1, 11))
def test_roots_match_sympy_and_residual(d):
    rs = find_roots(FrolovPolynomial(d))
    x, poly = sympy_poly(d)
    oracle = sorted((float(r) for r in sympy.Poly(poly, x).nroots(n=30)), reverse=True)
    assert rs.values == pytest.approx(oracle, rel=1e-13, abs=1e-13)
    p = FrolovPolynomial(d)
    for r in rs.roots:
        pr, dpr = evaluate_poly(p, r), sympy.diff(poly, x).subs(x, sympy.Float(str(r), 60))
        assert abs(pr) <= 1e-12 * max(1, abs(float(dpr)))
    assert all(a > b for a, b in zip(rs.values, rs.values[1:]))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_chebyshev_roots_inside_open_interval(k):
    d = 2**k
    rs = find_roots(FrolovPolynomial(d, "chebyshev"))
    assert len(rs) == d and all(abs(v) < 2 for v in rs.values)
    assert rs.residual <= 1e-12


@pytest.mark.parametrize("d", range(2, 11))
def test_simple_roots_alternate_sign(d):
    p = FrolovPolynomial(d)
    vals = find_roots(p).values
    mids = (vals[:-1] + vals[1:]) / 2
    signs = [np.sign(float(evaluate_poly(p, float(m)))) for m in mids]
    assert all(s != 0 for s in signs)
    assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_rational_root_sanity():
    assert rational_root_sanity(FrolovPolynomial(1)) is False
    assert rational_root_sanity(FrolovPolynomial(2)) is True
    assert rational_root_sanity(FrolovPolynomial(3)) is True


@pytest.mark.parametrize("d", range(2, 13))
def test_rational_root_sanity_against_sympy(d):
    x, poly = sympy_poly(d)
    rational = [r for r in sympy.roots(sympy.Poly(poly, x), filter="Q")]
    assert rational_root_sanity(FrolovPolynomial(d)) is (not rational)


def test_polylog_examples():
    assert polylog_negative_order(0, 0.5) == pytest.approx(1.0, rel=1e-14)
    assert polylog_negative_order(1, 0.5) == pytest.approx(2.0, rel=1e-14)
    brute = math.fsum(l**2 * 0.5**l for l in range(1, 201))
    assert polylog_negative_order(2, 0.5) == pytest.approx(brute, rel=1e-14)
    assert brute == pytest.approx(6.0, rel=1e-14)


@given(z=st.floats(1e-6, 0.9))
def test_polylog_order_zero_closed_form(z):
    assert polylog_negative_order(0, z) == pytest.approx(z / (1 - z), rel=1e-14)


@pytest.mark.parametrize("k", range(0, 8))
@pytest.mark.parametrize("z", [2.0**-1, 2.0**-3, 2.0**-5, 0.3])
def test_polylog_against_mpmath(k, z):
    assert polylog_negative_order(k, z) == pytest.approx(float(mpmath.polylog(-k, z)), rel=1e-13)


@pytest.mark.parametrize("k", [0, 1, 3, 6])
def test_polylog_increasing_in_z(k):
    zs = np.linspace(0.01, 0.95, 60)
    vals = [polylog_negative_order(k, float(z)) for z in zs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("z", [0.0, 1.0, -0.5, 2.0])
def test_polylog_domain(z):
    with pytest.raises(DomainError):
        polylog_negative_order(1, z)
