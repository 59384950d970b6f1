"""
Tests for the interval exit-time series.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from common.exceptions import AccuracyError, DomainError
from series_engine import (
    IntervalExitQuery,
    SeriesParams,
    Side,
    density_array,
    eta_density,
    eta_mixed_partial,
    eta_moment,
    eta_partial,
    eta_survival,
    mixed_partial_array,
    moment_array,
    partial_array,
    survival_array,
)
from series_engine.moments import unit_moment_polynomial

EIGEN_ONLY = SeriesParams(regime_ratio=1e-9)
IMAGES_ONLY = SeriesParams(regime_ratio=1e9)

POINTS = [(1.0, 1.0, 0.05), (0.3, 1.7, 0.5), (2.0, 0.5, 3.0), (1.0, 1.0, 1.0)]


def _query(u, v, t):
    return IntervalExitQuery(u=u, v=v, t=t)


def test_symmetric_unit_interval_value():
    """Survival of (-1, 1) at t = 1 from the leading eigenmodes"""
    expected = 4.0 / math.pi * math.exp(-math.pi**2 / 8.0) - 4.0 / (3.0 * math.pi) * math.exp(
        -9.0 * math.pi**2 / 8.0
    )
    value = eta_survival(_query(1.0, 1.0, 1.0))
    assert value == pytest.approx(0.37077, abs=1e-4)
    assert value == pytest.approx(expected, abs=1e-9)


def test_survival_at_time_zero_is_one():
    """No exit has happened at t = 0"""
    assert eta_survival(_query(0.2, 5.0, 0.0)) == 1.0


@pytest.mark.parametrize("u,v,t", POINTS)
def test_regimes_agree(u, v, t):
    """Eigenfunction and image forms give the same value"""
    for evaluate in (survival_array, density_array, mixed_partial_array):
        assert float(evaluate(u, v, t, EIGEN_ONLY)) == pytest.approx(
            float(evaluate(u, v, t, IMAGES_ONLY)), abs=1e-9
        )
    for side in Side:
        assert float(partial_array(u, v, t, side, EIGEN_ONLY)) == pytest.approx(
            float(partial_array(u, v, t, side, IMAGES_ONLY)), abs=1e-9
        )


def test_density_leading_term():
    """Density of (-1, 1) at t = 1 is dominated by the first mode"""
    leading = math.pi / 2.0 * math.exp(-math.pi**2 / 8.0)
    third = 3.0 * math.pi / 2.0 * math.exp(-9.0 * math.pi**2 / 8.0)
    assert eta_density(_query(1.0, 1.0, 1.0)) == pytest.approx(leading - third, abs=1e-9)


@pytest.mark.parametrize("u,v,t", POINTS)
def test_density_matches_time_difference(u, v, t):
    """Density is minus the time derivative of the survival"""
    h = 1e-5 * t
    difference = (survival_array(u, v, t - h) - survival_array(u, v, t + h)) / (2 * h)
    assert float(density_array(u, v, t)) == pytest.approx(float(difference), rel=1e-5, abs=1e-7)


@pytest.mark.parametrize("u,v,t", POINTS)
def test_partials_match_differences(u, v, t):
    """First partials agree with central differences and are nonnegative"""
    h = 1e-5
    du = (survival_array(u + h, v, t) - survival_array(u - h, v, t)) / (2 * h)
    dv = (survival_array(u, v + h, t) - survival_array(u, v - h, t)) / (2 * h)
    partial_u = eta_partial(_query(u, v, t), Side.U_SIDE)
    partial_v = eta_partial(_query(u, v, t), Side.V_SIDE)
    assert partial_u == pytest.approx(float(du), abs=1e-6)
    assert partial_v == pytest.approx(float(dv), abs=1e-6)
    assert partial_u >= -1e-12
    assert partial_v >= -1e-12


@pytest.mark.parametrize("u,v,t", POINTS)
def test_mixed_partial_matches_difference(u, v, t):
    """Mixed partial is the v-difference of the u-partial"""
    h = 1e-5
    difference = (
        partial_array(u, v + h, t, Side.U_SIDE) - partial_array(u, v - h, t, Side.U_SIDE)
    ) / (2 * h)
    assert eta_mixed_partial(_query(u, v, t)) == pytest.approx(float(difference), abs=1e-6)


def test_swapping_endpoints():
    """Survival is symmetric in (u, v) and the partials swap"""
    u, v, t = 0.4, 1.3, 0.7
    assert float(survival_array(u, v, t)) == pytest.approx(float(survival_array(v, u, t)), abs=1e-13)
    assert float(partial_array(u, v, t, Side.U_SIDE)) == pytest.approx(
        float(partial_array(v, u, t, Side.V_SIDE)), abs=1e-12
    )
    assert float(mixed_partial_array(u, v, t)) == pytest.approx(
        float(mixed_partial_array(v, u, t)), abs=1e-12
    )


def test_brownian_scaling():
    """Survival is invariant under (u, v, t) -> (cu, cv, c^2 t)"""
    c = 2.5
    values = survival_array(np.array([0.3, 1.0]), np.array([0.9, 1.0]), np.array([0.2, 1.5]))
    scaled = survival_array(c * np.array([0.3, 1.0]), c * np.array([0.9, 1.0]), c**2 * np.array([0.2, 1.5]))
    assert np.allclose(values, scaled, atol=1e-12)


def test_survival_monotone_in_endpoints_and_time():
    """Wider intervals survive longer; survival decreases in t"""
    t = np.linspace(0.01, 5.0, 60)
    narrow = survival_array(0.5, 1.0, t)
    wide = survival_array(0.8, 1.0, t)
    assert np.all(wide >= narrow - 1e-12)
    assert np.all(np.diff(narrow) <= 1e-12)
    assert np.all((narrow >= 0.0) & (narrow <= 1.0))


def test_array_broadcasting():
    """Arrays broadcast like numpy operands"""
    out = survival_array(np.array([[0.5], [1.0]]), 1.0, np.array([0.1, 0.2, 0.3]))
    assert out.shape == (2, 3)


@pytest.mark.parametrize(
    "kwargs", [{"u": 0.0, "v": 1.0, "t": 1.0}, {"u": 1.0, "v": -1.0, "t": 1.0}, {"u": 1.0, "v": 1.0, "t": -0.1}]
)
def test_query_rejects_out_of_range(kwargs):
    """Nonpositive endpoints and negative times are domain errors"""
    with pytest.raises(DomainError):
        IntervalExitQuery(**kwargs)


def test_derivatives_need_positive_time():
    with pytest.raises(DomainError):
        density_array(1.0, 1.0, 0.0)


def test_accuracy_error_reports_bound():
    """Too few allowed terms raises AccuracyError with the reached bound"""
    params = SeriesParams(max_terms=1, regime_ratio=1e-9)
    with pytest.raises(AccuracyError) as exc_info:
        eta_survival(_query(1.0, 1.0, 0.2), params)
    assert exc_info.value.achieved_bound > params.abs_tol


def test_first_moment_is_product():
    """E[eta] = u v"""
    assert eta_moment(1.0, 1.0, 1) == pytest.approx(1.0, abs=1e-12)
    assert eta_moment(0.3, 1.7, 1) == pytest.approx(0.51, abs=1e-12)


def test_second_moment_unit_interval():
    """E[eta^2] of (-1, 1) from the centre is 5/3"""
    assert eta_moment(1.0, 1.0, 2) == pytest.approx(5.0 / 3.0, abs=1e-12)


def test_unit_polynomials_vanish_at_endpoints():
    for order in range(1, 6):
        poly = unit_moment_polynomial(order)
        assert poly(0.0) == pytest.approx(0.0, abs=1e-14)
        assert poly(1.0) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("u,v", [(1.0, 1.0), (0.4, 1.1)])
def test_fractional_moment_matches_integral(u, v):
    """Non-integer moments equal the integral of p t^(p-1) S(t)"""
    p = 1.5
    integral, _ = quad(lambda t: p * t ** (p - 1) * float(survival_array(u, v, t)), 0.0, np.inf, limit=200)
    assert eta_moment(u, v, p) == pytest.approx(integral, rel=1e-6)


def test_moment_series_near_integer_order():
    """Series orders approach the polynomial values"""
    assert eta_moment(0.7, 1.2, 2.0000001) == pytest.approx(eta_moment(0.7, 1.2, 2), rel=1e-5)


def test_moment_scaling():
    """E[eta_(-cu,cv)^p] = c^(2p) E[eta_(-u,v)^p]"""
    base = moment_array(np.array([0.5, 1.0]), np.array([1.5, 1.0]), 2.5)
    scaled = moment_array(2.0 * np.array([0.5, 1.0]), 2.0 * np.array([1.5, 1.0]), 2.5)
    assert np.allclose(scaled, 2.0**5 * base, rtol=1e-9)


def test_moment_rejects_small_order():
    with pytest.raises(DomainError):
        eta_moment(1.0, 1.0, 0.5)


def test_moment_falls_back_to_time_integral():
    """A term budget too small for the series switches to integrating the survival function"""
    exact = eta_moment(1.0, 1.0, 1.5)
    assert eta_moment(1.0, 1.0, 1.5, SeriesParams(max_terms=20)) == pytest.approx(exact, abs=1e-10)


@pytest.mark.parametrize("u,v,p", [(0.01, 5.0, 1.3), (0.02, 1.98, 1.5), (3.0, 4.0, 2.5)])
def test_fractional_moment_near_endpoint(u, v, p):
    """Start points near an endpoint and long intervals stay within tolerance"""
    def integrand(s):
        return p * math.exp(p * s) * float(survival_array(u, v, math.exp(s)))

    integral, _ = quad(integrand, -40.0, 7.0, points=[2.0 * math.log(u)], limit=400, epsabs=0.0, epsrel=1e-9)
    value = eta_moment(u, v, p)
    assert value == pytest.approx(integral, rel=1e-7)
    # Lyapunov bounds
    if p <= 2:
        assert (u * v) ** p <= value <= eta_moment(u, v, 2) ** (p / 2.0)
