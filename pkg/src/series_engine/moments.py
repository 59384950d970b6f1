"""
Moments E_0[eta_(-u,v)^p] of the interval exit time.

Integrating the eigenfunction series term by term gives

    E_0[eta^p] = sum_{k odd} 4/(k pi) sin(k pi u / L) Gamma(p+1) / lambda_k^p,
    lambda_k = k^2 pi^2 / (2 L^2).

For integer p this sum is a polynomial in (u, v): it is the solution of
(1/2) m_p'' = -p m_{p-1} on (0, L) with zero boundary values, evaluated at
the start point. Integer orders use that polynomial. Other orders sum the
series with an Abel-summation tail bound, or integrate p t^(p-1) P_x[eta > t]
over log t when the series would need more than max_terms terms.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import gamma, gammaincc

from common.exceptions import DomainError
from series_engine.eta import survival_array
from series_engine.params import SeriesParams

logger = logging.getLogger(__name__)

_CHUNK = 1 << 12
_TIME_CHUNK = 1 << 9
# trapezoid step in log t; the integrand is analytic in a strip of half-width pi/2
_LOG_STEP = 0.25
# unit-interval tolerance floor, below double rounding of unit-scale moments
_UNIT_TOL_FLOOR = 1e-16


@lru_cache(maxsize=64)
def unit_moment_polynomial(order: int) -> Polynomial:
    """
    Moment polynomial g_p on the unit interval.

    g_0 = 1 and g_p'' = -2 p g_{p-1} with g_p(0) = g_p(1) = 0, so that
    E_x[eta_(0,1)^p] = g_p(x).
    """
    poly = Polynomial([1.0])
    for p in range(1, order + 1):
        poly = (-2.0 * p * poly).integ(2)
        # add c1 x so that poly(1) = 0; integ leaves poly(0) = 0
        poly = poly - Polynomial([0.0, poly(1.0)])
    return poly


def _check_order(p) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 1:
        raise DomainError("moment order p must be a finite real >= 1", {"p": p})
    return p


def _series_terms(x: np.ndarray, p: float, tol: np.ndarray) -> Tuple[float, np.ndarray]:
    """Leading coefficient and per-point term counts for the termwise series."""
    coefficient = 4.0 / math.pi * gamma(p + 1.0) * (2.0 / math.pi**2) ** p
    sin_theta = np.abs(np.sin(math.pi * x))
    # Abel summation over odd k: |tail from k| <= a_k / |sin(pi x)|
    k_needed = (coefficient / (np.maximum(sin_theta, 1e-300) * tol)) ** (1.0 / (2.0 * p + 1.0))
    # plain bound: sum_{odd j >= k} a_j <= a_k (1 + k / (4 p))
    k_plain = (coefficient * (1.0 + 1.0 / (2.0 * p)) / tol) ** (1.0 / (2.0 * p))
    k_needed = np.minimum(k_needed, k_plain)
    return coefficient, np.ceil((k_needed - 1.0) / 2.0).astype(np.int64) + 1


def _series_moment(x: np.ndarray, p: float, coefficient: float, n_terms: int) -> np.ndarray:
    """Termwise series on the unit interval at start points x in (0, 1)."""
    k = 2.0 * np.arange(n_terms) + 1.0
    weights = coefficient * k ** (-(2.0 * p + 1.0))
    out = np.empty(x.shape)
    for start in range(0, x.size, _CHUNK):
        part = x[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.sin(math.pi * np.outer(part, k)) @ weights
    return out


def _tail_bound(p: float, t_max: float) -> float:
    # S_x(t) <= (8 / pi) exp(-pi^2 t / 2) for t >= 1 on the unit interval
    rate = 0.5 * math.pi**2
    return p * 8.0 / math.pi * gamma(p) * gammaincc(p, rate * t_max) / rate**p


def _time_integral_moment(
    x: np.ndarray, y: np.ndarray, p: float, tol: float, params: SeriesParams
) -> np.ndarray:
    """
    p * int_0^inf t^(p-1) S_x(t) dt on the unit interval, y = 1 - x.

    The integrand is analytic in s = log t, so the trapezoid rule on an
    evenly spaced s grid converges geometrically. The grid starts where the
    omitted mass t^p drops below tol / 4 and ends where the survival tail does.
    """
    t_max = 1.0
    while _tail_bound(p, t_max) > 0.25 * tol:
        t_max *= 1.25
    s = np.arange(math.log(0.25 * tol) / p, math.log(t_max) + _LOG_STEP, _LOG_STEP)
    t = np.exp(s)
    weights = _LOG_STEP * p * t**p
    weights[[0, -1]] *= 0.5

    inner = params.model_copy(update={"abs_tol": 0.25 * tol / t_max**p})
    out = np.empty(x.shape)
    for start in range(0, x.size, _TIME_CHUNK):
        part = x[start:start + _TIME_CHUNK, None]
        other = y[start:start + _TIME_CHUNK, None]
        out[start:start + _TIME_CHUNK] = survival_array(part, other, t[None, :], inner) @ weights
    return out


def _fractional_moment(
    x: np.ndarray, y: np.ndarray, p: float, tol: np.ndarray, params: SeriesParams
) -> np.ndarray:
    """
    Unit-interval moments of non-integer order.

    Points whose series fits in max_terms use it; the rest, start points
    close to an endpoint or tight tolerances, integrate the survival
    function in log time instead.
    """
    coefficient, terms = _series_terms(x, p, tol)
    by_series = terms <= params.max_terms
    out = np.empty(x.shape)
    if np.any(by_series):
        out[by_series] = _series_moment(x[by_series], p, coefficient, int(terms[by_series].max()))
    if not np.all(by_series):
        logger.debug(
            "Order %s moment: %d of %d points integrated in time", p, int((~by_series).sum()), x.size
        )
        out[~by_series] = _time_integral_moment(
            x[~by_series], y[~by_series], p, float(tol[~by_series].min()), params
        )
    return out


def moment_array(u, v, p: float, params: SeriesParams = None) -> np.ndarray:
    """
    E_0[eta_(-u,v)^p], broadcast over u and v.

    Uses Brownian scaling E[eta_(-u,v)^p] = L^{2p} E_{u/L}[eta_(0,1)^p].
    """
    params = params if params is not None else SeriesParams()
    p = _check_order(p)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise DomainError("u and v must be finite")
    if np.any(u <= 0) or np.any(v <= 0):
        raise DomainError("u and v must be positive")

    L = u + v
    x = (u / L).ravel()
    if p.is_integer():
        unit = unit_moment_polynomial(int(p))(x)
    else:
        # the unit-interval value is scaled by L^{2p}, so its tolerance shrinks by the same factor
        tol = np.maximum(params.abs_tol / L.ravel() ** (2.0 * p), _UNIT_TOL_FLOOR)
        unit = _fractional_moment(x, (v / L).ravel(), p, tol, params)

    return (L ** (2.0 * p)) * unit.reshape(L.shape)


def eta_moment(u: float, v: float, p: float, params: SeriesParams = None) -> float:
    """
    p-th moment of the exit time of (-u, v) for Brownian motion started at 0.

    Args:
        u: Distance to the left endpoint
        v: Distance to the right endpoint
        p: Moment order, p >= 1
        params: Truncation controls for non-integer p

    Returns:
        E_0[eta_(-u,v)^p]

    Raises:
        DomainError: If p < 1 or u, v are not positive
        AccuracyError: If the survival series behind a non-integer order cannot reach
            its tolerance within max_terms
    """
    return float(moment_array(u, v, p, params))
