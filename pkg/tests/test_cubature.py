import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as spi
from scipy.special import betainc

from frolov import (DomainError, NonFiniteValue, PeriodizationMap, build_rule, bump,
                    error_constant, integrate, periodize, theoretical_bound, trig_mode)

from conftest import cached_basis


def test_d1_rule_is_rectangle_rule():
    rule = build_rule(cached_basis(1), 10)
    assert rule.count == 10 and rule.weight == pytest.approx(0.1, rel=1e-15)


def test_d1_sin_squared_exact():
    rule = build_rule(cached_basis(1), 10)
    assert integrate(rule, lambda x: np.sin(np.pi * x[:, 0]) ** 2) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("n", [7, 10, 16])
def test_d1_exactness_for_low_frequencies(n):
    rule = build_rule(cached_basis(1), n)
    for k in range(1, n):
        c = integrate(rule, lambda x: np.cos(2 * np.pi * k * x[:, 0]))
        s = integrate(rule, lambda x: np.sin(2 * np.pi * k * x[:, 0]))
        assert abs(c) <= 1e-12 and abs(s) <= 1e-12


def test_d2_weight_and_count():
    rule = build_rule(cached_basis(2), 10)
    assert rule.count == 284
    assert rule.weight == pytest.approx(3.5355e-3, rel=1e-4)
    assert 0.95 < rule.weight * rule.count < 1.05


def test_box_domain_volume():
    rule = build_rule(cached_basis(2), 10, domain=([0, 0], [2, 1]))
    assert rule.weight * rule.count == pytest.approx(2.0, rel=0.1)
    assert np.all(rule.nodes.points[:, 0] < 2) and np.all(rule.nodes.points[:, 1] < 1)
    assert rule.volume == 2.0


@pytest.mark.parametrize("d,a", [(2, 4), (2, 16), (3, 4), (3, 8)])
def test_weight_sum_approaches_volume(d, a):
    rule = build_rule(cached_basis(d), a)
    assert abs(rule.weight * rule.count - 1) <= 0.1


def test_bump_integral_for_large_scale():
    rule = build_rule(cached_basis(2), 64)
    assert integrate(rule, bump(2, 2)) == pytest.approx(1.0, abs=1e-9)


def test_zero_integrand():
    for d in (1, 2, 3):
        assert integrate(build_rule(cached_basis(d), 5), lambda x: np.zeros(len(x))) == 0.0


def test_non_finite_values_raise():
    rule = build_rule(cached_basis(2), 5)
    with pytest.raises(NonFiniteValue), np.errstate(divide="ignore"):
        integrate(rule, lambda x: 1.0 / x[:, 0])


def test_deterministic_sum():
    f = bump(3, 2)
    r1 = integrate(build_rule(cached_basis(3), 12), f)
    r2 = integrate(build_rule(cached_basis(3), 12), f)
    assert r1.hex() == r2.hex()


def test_parallel_evaluation_matches_serial(monkeypatch):
    import frolov.cubature as cub
    rule = build_rule(cached_basis(2), 30)
    f = bump(2, 3)
    monkeypatch.setenv("FROLOV_THREADS", "1")
    serial = integrate(rule, f)
    monkeypatch.setenv("FROLOV_THREADS", "4")
    monkeypatch.setattr(cub, "_PARALLEL_MIN", 10)
    assert integrate(rule, f).hex() == serial.hex()


def test_reflection_sanity():
    rule = build_rule(cached_basis(2), 16)
    f = lambda x: bump(2, 2)(x) * (1 + x[:, 0])
    g = lambda x: f(1 - x)
    assert abs(integrate(rule, f) - integrate(rule, g)) <= 2 * theoretical_bound(2, 2, 16)


def test_periodized_requires_unit_cube_and_s():
    b = cached_basis(2)
    with pytest.raises(DomainError):
        build_rule(b, 4, mode="periodized", s=2, domain=([0, 0], [2, 1]))
    with pytest.raises(DomainError):
        build_rule(b, 4, mode="periodized")


# -- bound ---------------------------------------------------------------

def test_bound_closed_forms():
    # c_{1,1} = 2^4 sqrt(Li_0(1/2)) = 16; bound = 16 * 4^-1
    assert error_constant(1, 1) == pytest.approx(16.0, rel=1e-14)
    assert theoretical_bound(1, 1, 4) == pytest.approx(4.0, rel=1e-12)
    # c_{1,2} = 2^5 sqrt(Li_{-1}(1/2)) = 32 sqrt 2; bound = c * 4^-2 * log2(16)^(1/2)
    assert error_constant(1, 2) == pytest.approx(45.2548, rel=1e-6)
    assert theoretical_bound(1, 2, 4) == pytest.approx(32 * math.sqrt(2) / 16 * 2, rel=1e-12)
    # c_{2,1} = 2^6 sqrt(Li_0(1/8)) = 64 / sqrt 7
    assert theoretical_bound(2, 1, 2) == pytest.approx(64 / math.sqrt(7) / 4, rel=1e-12)
    assert theoretical_bound(2, 1, 2) == pytest.approx(6.047, rel=1e-3)


def test_bound_domain():
    with pytest.raises(DomainError):
        theoretical_bound(1, 2, 1.0)


@pytest.mark.parametrize("s,d", [(1, 1), (2, 2), (3, 4)])
def test_bound_rate(s, d):
    r = theoretical_bound(s, d, 20.0) / theoretical_bound(s, d, 10.0)
    expected = 2.0 ** (-s * d) * (math.log2(20**d) / math.log2(10**d)) ** ((d - 1) / 2)
    assert r == pytest.approx(expected, rel=1e-12)


# -- periodization -------------------------------------------------------

@pytest.mark.parametrize("s", [1, 2, 3, 5])
def test_psi_matches_regularized_incomplete_beta(s):
    pm = PeriodizationMap(s)
    t = np.linspace(0, 1, 101)
    assert pm.psi(t) == pytest.approx(betainc(s + 1, s + 1, t), abs=1e-14)


@given(s=st.integers(1, 6), t=st.floats(0, 1))
def test_psi_symmetry(s, t):
    pm = PeriodizationMap(s)
    assert pm.psi(1 - t) == pytest.approx(1 - pm.psi(t), abs=1e-14)


@pytest.mark.parametrize("s", [1, 2, 4])
def test_psi_endpoints_monotone_and_derivative(s):
    pm = PeriodizationMap(s)
    assert pm.psi(0.0) == 0.0 and pm.psi(1.0) == 1.0
    t = np.linspace(0, 1, 2001)
    assert np.all(np.diff(pm.psi(t)) > 0)
    h = 1e-6
    mid = t[1:-1]
    fd = (pm.psi(mid + h) - pm.psi(mid - h)) / (2 * h)
    assert fd == pytest.approx(pm.dpsi(mid), abs=1e-7)
    # psi' vanishes to order s at both ends
    eps = 1e-3
    assert pm.dpsi(eps) / eps**s == pytest.approx(float(pm.norm), rel=1e-2)
    assert pm.dpsi(1 - eps) / eps**s == pytest.approx(float(pm.norm), rel=1e-2)


def test_psi_normalization_exact():
    assert PeriodizationMap(2).norm == 30
    assert PeriodizationMap(1).norm == 6


def test_periodize_examples():
    g = periodize(lambda x: np.ones(len(x)), 1)
    assert g(np.array([[0.5]]))[0] == pytest.approx(1.5)
    g2 = periodize(lambda x: np.ones(len(x)), 1)
    val, _ = spi.dblquad(lambda y, x: g2(np.array([[x, y]]))[0], 0, 1, 0, 1)
    assert val == pytest.approx(1.0, abs=1e-12)
    corners = np.array([[0, 0], [1, 0], [0, 1], [1, 1], [0, 0.3], [0.7, 1]], dtype=float)
    assert np.all(g2(corners) == 0)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_periodize_preserves_integral(s):
    f = lambda x: np.exp(x[:, 0]) * (1 + x[:, 0] ** 2)
    g = periodize(f, s)
    val, _ = spi.quad(lambda t: g(np.array([[t]]))[0], 0, 1, epsabs=1e-14)
    exact, _ = spi.quad(lambda t: f(np.array([[t]]))[0], 0, 1, epsabs=1e-14)
    assert val == pytest.approx(exact, abs=1e-12)


def test_periodized_constant_converges():
    b = cached_basis(2)
    one = trig_mode(2, 0)
    errs = [abs(integrate(build_rule(b, a, mode="periodized", s=2), one) - 1) for a in (8, 32)]
    assert errs[1] < errs[0]
    assert errs[1] <= theoretical_bound(2, 2, 32)
