from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
import sympy

from splinestab.symbols import (
    F_at_pi_exact,
    F_eval,
    RouteMismatch,
    c_M,
    monotonicity_check,
    rho_exceeds_pi2,
    symbol_at_pi_exact,
    symbol_eval,
    threshold_delta,
    threshold_rho,
    thresholds,
    zero_count_F,
)

PRINTED_RHO = [F(12), F(10), F(168, 17), F(306, 31), F(2349, 238), F(7797, 790)]
PRINTED_DELTA = [F(-1, 12), F(-1, 120), F(-17, 20160), F(-5, 58529), F(-2, 231067), F(-1, 1140271)]


def poisson_symbol(p, power, theta):
    """sum_j w^power sinc(w/2)^(2p+2) over w = theta + 2 pi j."""
    with mpmath.workdps(30):
        def term(j):
            w = theta + 2 * mpmath.pi * j
            return w**power * (mpmath.sin(w / 2) / (w / 2)) ** (2 * p + 2)
        return float(mpmath.nsum(term, [-mpmath.inf, mpmath.inf]))


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("theta", [0.3, 1.7, 2.9])
def test_symbols_against_poisson_series(p, theta):
    val = symbol_eval(p, p, theta)
    assert val.M == pytest.approx(poisson_symbol(p, 0, theta), rel=1e-10)
    assert val.B == pytest.approx(-poisson_symbol(p, 2, theta), rel=1e-8)
    assert val.D_k == pytest.approx((-1) ** p * poisson_symbol(p, 2 * p, theta), rel=1e-6)


def test_symbol_guard():
    with pytest.raises(ValueError):
        symbol_eval(2, 3, 0.1)
    with pytest.raises(ValueError):
        symbol_at_pi_exact(0, 0)


def test_mass_symbol_at_zero_is_one():
    for p in range(1, 7):
        assert symbol_eval(p, 0, 0.0).M == pytest.approx(1.0)
        assert symbol_eval(p, 1, 0.0).B == pytest.approx(0.0, abs=1e-12)


def test_pi_values_p1():
    M, B, D = symbol_at_pi_exact(1, 1)
    assert (M, B, D) == (F(1, 3), F(-4), F(-4))


@pytest.mark.parametrize("p", range(1, 5))
def test_thresholds_match_printed_for_small_p(p):
    assert threshold_rho(p) == PRINTED_RHO[p - 1]
    if p <= 3:
        assert threshold_delta(p) == PRINTED_DELTA[p - 1]


def _convergents(q: F):
    cf = sympy.continued_fraction(sympy.Rational(q.numerator, q.denominator))
    return {F(int(c.p), int(c.q)) for c in sympy.continued_fraction_convergents(cf)}


def test_printed_large_p_values_are_convergents():
    # the printed rho_5, rho_6, delta_4.. delta_6 truncate the continued fraction
    assert PRINTED_RHO[4] in _convergents(threshold_rho(5))
    assert PRINTED_RHO[5] in _convergents(threshold_rho(6))
    for p in (4, 5, 6):
        assert PRINTED_DELTA[p - 1] in _convergents(threshold_delta(p))
        assert PRINTED_DELTA[p - 1] != threshold_delta(p)


@pytest.mark.parametrize("p", range(1, 7))
def test_threshold_rho_against_mpmath_zeta(p):
    with mpmath.workdps(40):
        ref = 4 * (4**p - 1) / mpmath.mpf(4 ** (p + 1) - 1) * mpmath.zeta(2 * p) / mpmath.zeta(2 * p + 2) * mpmath.pi**2
        r = threshold_rho(p)
        assert abs(mpmath.mpf(r.numerator) / r.denominator - ref) < mpmath.mpf(10) ** -35


@pytest.mark.parametrize("p", range(1, 7))
def test_threshold_zeroes_F_at_pi(p):
    assert F_at_pi_exact(p, p, threshold_rho(p), 0) == 0
    for k in range(1, p + 1):
        M, _, D = symbol_at_pi_exact(p, k)
        assert M + threshold_delta(p, k) * (-1) ** k * D == 0


def test_delta_p_k_table():
    t = thresholds(2)
    assert t.delta_p_k == {1: F(-1, 10), 2: F(-1, 120)}
    assert t.rho_p == 10 and t.delta_p == F(-1, 120)


def test_threshold_guards():
    with pytest.raises(ValueError):
        threshold_rho(0)
    with pytest.raises(ValueError):
        threshold_delta(2, 3)


def test_route_mismatch_is_assertion():
    assert issubclass(RouteMismatch, AssertionError)


def test_rho_exceeds_pi2():
    assert all(rho_exceeds_pi2(p) for p in range(1, 21))
    assert float(threshold_rho(20)) - np.pi**2 < 1e-9


def test_F_eval_matches_exact_at_pi():
    p, rho, delta = 3, F(37, 3), F(-1, 2000)
    assert F_eval(p, p, np.pi, rho, delta) == pytest.approx(float(F_at_pi_exact(p, p, rho, delta)), rel=1e-12)
    assert F_eval(p, p, 0.0, rho, delta) == pytest.approx(float(rho))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_monotone_regime(p):
    assert monotonicity_check(p, p, 5, 0)
    assert monotonicity_check(p, p, 20000, threshold_delta(p))
    with pytest.raises(ValueError):
        monotonicity_check(p, p, 5, 0, grid_size=1)


def test_zero_count():
    assert zero_count_F(1, 1, 11, 0) == 2
    assert zero_count_F(1, 1, 12, 0) == 2
    assert zero_count_F(1, 1, 13, 0) == 0
    with pytest.raises(ValueError):
        zero_count_F(1, 1, 11, F(1, 10))
    with pytest.raises(ValueError):
        zero_count_F(1, 1, 0, 0)


@pytest.mark.parametrize("M", [1, 2, 5])
def test_c_M(M):
    with mpmath.workdps(40):
        ref = mpmath.pi ** (2 * M - 2) / ((1 - mpmath.mpf(2) ** (-2 * M)) * mpmath.zeta(2 * M))
        assert abs(c_M(M, dps=40) - ref) < mpmath.mpf(10) ** -30
    with pytest.raises(ValueError):
        c_M(0)
