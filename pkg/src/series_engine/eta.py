"""
Exit law of one-dimensional Brownian motion from (-u, v) started at 0.

Two series represent P_0[eta > t]. With L = u + v:

    eigenfunction form
        sum_{k odd} 4/(k pi) sin(k pi u / L) exp(-k^2 pi^2 t / (2 L^2))

    image form
        1 + sum_j sum_{i=1..4} s_i g((alpha_ij u + beta_ij v) / sqrt(t)),
        g(a) = Phi(a) - [a >= 0]

The eigenfunction form is used when t / L^2 >= regime_ratio and the image
form otherwise. Derivatives in u, v and t are taken term by term in the
active form. Every function here broadcasts over array arguments.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.special import ndtr

from common.exceptions import AccuracyError, DomainError
from series_engine.params import IntervalExitQuery, SeriesParams, Side

logger = logging.getLogger(__name__)

SURVIVAL = "survival"
DENSITY = "density"
PARTIAL_U = "partial_u"
PARTIAL_V = "partial_v"
MIXED = "mixed"

_PI = math.pi
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CHUNK = 1 << 15

# Image-form block layout: four normal arguments per reflection index j,
# argument = (alpha u + beta v) / sqrt(t) with alpha = 2j + a0, beta = 2j + b0
_IMAGE_ALPHA0 = np.array([0, -1, 2, 1])
_IMAGE_BETA0 = np.array([1, 0, 1, 0])
_IMAGE_SIGN = np.array([1.0, -1.0, -1.0, 1.0])


def _as_arrays(u, v, t, require_positive_t: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    u, v, t = np.broadcast_arrays(
        np.asarray(u, dtype=float), np.asarray(v, dtype=float), np.asarray(t, dtype=float)
    )
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v)) and np.all(np.isfinite(t))):
        raise DomainError("u, v and t must be finite")
    if np.any(u <= 0) or np.any(v <= 0):
        raise DomainError("u and v must be positive")
    if np.any(t < 0):
        raise DomainError("t must be nonnegative")
    if require_positive_t and np.any(t == 0):
        raise DomainError("t must be positive for derivatives of the exit law")
    return u, v, t


def _eigen_envelope(kind: str, u, v, t, L) -> Tuple[np.ndarray, int]:
    """Scale and power of k bounding |term_k| / exp(-k^2 pi^2 t / (2 L^2))."""
    if kind == SURVIVAL:
        return np.full(u.shape, 4.0 / _PI), 0
    if kind == DENSITY:
        return 2.0 * _PI / L**2, 1
    if kind in (PARTIAL_U, PARTIAL_V):
        return 4.0 / L + 4.0 * _PI * t / L**3, 1
    scale = 4.0 / L**4 * (_PI**3 * t**2 / L**2 + 3.0 * _PI * t + _PI * u * v)
    scale = scale + 4.0 / L**3 * (_PI**2 * t * np.abs(v - u) / L**2 + np.abs(u - v))
    return scale, 3


def _eigen_term_count(rate, scale, degree: int, params: SeriesParams) -> int:
    """Terms needed so that every omitted term is below abs_tol / 2."""
    target = np.log(np.maximum(scale, 1e-300) / (0.5 * params.abs_tol))
    target = np.maximum(target, 0.0)
    k = np.sqrt(target / rate)
    for _ in range(4):
        k = np.sqrt((target + degree * np.log(np.maximum(k, 1.0))) / rate)
    # past the peak of k^degree exp(-k^2 rate)
    k = np.maximum(k, np.sqrt(degree / (2.0 * rate)))
    n_terms = int(np.max(np.ceil((k - 1.0) / 2.0))) + 1

    if n_terms > params.max_terms:
        k_last = 2.0 * params.max_terms + 1.0
        achieved = float(np.max(scale * k_last**degree * np.exp(-(k_last**2) * rate)))
        raise AccuracyError(
            f"Eigenfunction series needs {n_terms} terms, max_terms is {params.max_terms}",
            achieved_bound=achieved,
            details={"terms_needed": n_terms},
        )
    return n_terms


def _eigen_sum(kind: str, u, v, t, params: SeriesParams) -> np.ndarray:
    L = u + v
    rate = _PI**2 * t / (2.0 * L**2)
    scale, degree = _eigen_envelope(kind, u, v, t, L)
    n_terms = _eigen_term_count(rate, scale, degree, params)

    k = (2.0 * np.arange(n_terms) + 1.0)[None, :]
    u, v, t, L, rate = (x[:, None] for x in (u, v, t, L, rate))
    theta = k * _PI * u / L
    decay = np.exp(-(k**2) * rate)
    sin, cos = np.sin(theta), np.cos(theta)

    if kind == SURVIVAL:
        terms = 4.0 / (k * _PI) * sin * decay
    elif kind == DENSITY:
        terms = 2.0 * k * _PI / L**2 * sin * decay
    elif kind == PARTIAL_U:
        terms = decay * (4.0 * v * cos / L**2 + 4.0 * k * _PI * t * sin / L**3)
    elif kind == PARTIAL_V:
        terms = decay * (-4.0 * u * cos / L**2 + 4.0 * k * _PI * t * sin / L**3)
    else:
        sin_part = sin / L**4 * (
            (k * _PI) ** 3 * t**2 / L**2 - 3.0 * k * _PI * t + k * _PI * u * v
        )
        cos_part = cos / L**3 * ((k * _PI) ** 2 * t * (v - u) / L**2 + u - v)
        terms = 4.0 * decay * (sin_part + cos_part)

    return terms.sum(axis=1)


def _image_prefactor(kind: str, z, s, t, L):
    """Polynomial factor multiplying phi(z) in the largest omitted image term."""
    if kind == SURVIVAL:
        return np.ones_like(z)
    if kind == DENSITY:
        return z / (2.0 * t)
    reach = z * s / L + 3.0
    if kind in (PARTIAL_U, PARTIAL_V):
        return reach / s
    return z * reach**2 / s**2


def _image_block_count(kind: str, s, t, L, params: SeriesParams) -> int:
    """Reflection depth K such that omitted blocks sum below abs_tol."""
    budget = params.abs_tol / 16.0
    z = np.full(s.shape, math.sqrt(2.0 * math.log(1.0 / budget)))
    for _ in range(4):
        prefactor = np.maximum(_image_prefactor(kind, z, s, t, L), 1.0)
        z = np.sqrt(2.0 * np.log(prefactor * _INV_SQRT_2PI / budget))
    depth = int(np.max(np.ceil((z * s / L - 1.0) / 2.0)))
    depth = max(depth, 1)

    if depth > params.max_terms:
        reach = (2.0 * params.max_terms + 1.0) * L / s
        achieved = float(
            np.max(16.0 * _image_prefactor(kind, reach, s, t, L) * np.exp(-0.5 * reach**2) * _INV_SQRT_2PI)
        )
        raise AccuracyError(
            f"Image series needs depth {depth}, max_terms is {params.max_terms}",
            achieved_bound=achieved,
            details={"depth_needed": depth},
        )
    return depth


def _image_sum(kind: str, u, v, t, params: SeriesParams) -> np.ndarray:
    L = u + v
    s = np.sqrt(t)
    depth = _image_block_count(kind, s, t, L, params)

    j = np.arange(-(depth + 1), depth + 1)[:, None]
    alpha = (2 * j + _IMAGE_ALPHA0[None, :]).ravel().astype(float)
    beta = (2 * j + _IMAGE_BETA0[None, :]).ravel().astype(float)
    sign = np.tile(_IMAGE_SIGN, j.shape[0])

    u, v, t, s = (x[:, None] for x in (u, v, t, s))
    arg = (alpha * u + beta * v) / s

    if kind == SURVIVAL:
        # Phi(a) - [a >= 0]; the indicators sum to exactly 1 over all blocks
        shifted = np.where(arg < 0, ndtr(arg), -ndtr(-arg))
        return 1.0 + (sign * shifted).sum(axis=1)

    pdf = np.exp(-0.5 * arg**2) * _INV_SQRT_2PI
    if kind == DENSITY:
        terms = sign * pdf * arg / (2.0 * t)
    elif kind == PARTIAL_U:
        terms = sign * pdf * alpha / s
    elif kind == PARTIAL_V:
        terms = sign * pdf * beta / s
    else:
        terms = -sign * arg * pdf * alpha * beta / s**2
    return terms.sum(axis=1)


def _evaluate(kind: str, u, v, t, params: SeriesParams) -> np.ndarray:
    params = params if params is not None else SeriesParams()
    u, v, t = _as_arrays(u, v, t, require_positive_t=kind != SURVIVAL)
    shape = u.shape
    u, v, t = u.ravel(), v.ravel(), t.ravel()
    out = np.zeros(u.shape)

    if kind == SURVIVAL:
        out[t == 0] = 1.0
    active = t > 0
    eigen = active & (t / (u + v) ** 2 >= params.regime_ratio)
    images = active & ~eigen

    for mask, evaluator in ((eigen, _eigen_sum), (images, _image_sum)):
        index = np.flatnonzero(mask)
        for start in range(0, index.size, _CHUNK):
            part = index[start:start + _CHUNK]
            out[part] = evaluator(kind, u[part], v[part], t[part], params)

    if kind == SURVIVAL:
        overshoot = np.max(np.abs(out - np.clip(out, 0.0, 1.0)), initial=0.0)
        if overshoot > 10 * params.abs_tol:
            logger.warning("Survival truncation overshoot %.3g clamped", overshoot)
        out = np.clip(out, 0.0, 1.0)

    return out.reshape(shape)


def survival_array(u, v, t, params: SeriesParams = None) -> np.ndarray:
    """P_0[eta_(-u,v) > t], broadcast over u, v, t; clamped to [0, 1]."""
    return _evaluate(SURVIVAL, u, v, t, params)


def density_array(u, v, t, params: SeriesParams = None) -> np.ndarray:
    """-d/dt P_0[eta_(-u,v) > t] for t > 0."""
    return _evaluate(DENSITY, u, v, t, params)


def partial_array(u, v, t, side: Side, params: SeriesParams = None) -> np.ndarray:
    """d/du or d/dv of P_0[eta_(-u,v) > t] for t > 0."""
    kind = PARTIAL_U if Side(side) == Side.U_SIDE else PARTIAL_V
    return _evaluate(kind, u, v, t, params)


def mixed_partial_array(u, v, t, params: SeriesParams = None) -> np.ndarray:
    """d^2/(du dv) of P_0[eta_(-u,v) > t] for t > 0; sign unconstrained."""
    return _evaluate(MIXED, u, v, t, params)


def eta_survival(query: IntervalExitQuery, params: SeriesParams = None) -> float:
    """
    Survival probability P_0[eta_(-u,v) > t].

    Args:
        query: Interval half-widths and time
        params: Truncation controls (defaults if omitted)

    Returns:
        Probability in [0, 1] with absolute error <= params.abs_tol

    Raises:
        AccuracyError: If the tail bound is out of reach within max_terms
    """
    return float(survival_array(query.u, query.v, query.t, params))


def eta_density(query: IntervalExitQuery, params: SeriesParams = None) -> float:
    """Density of eta_(-u,v) at t > 0."""
    return float(density_array(query.u, query.v, query.t, params))


def eta_partial(query: IntervalExitQuery, side: Side, params: SeriesParams = None) -> float:
    """First partial in u or v; nonnegative up to abs_tol."""
    return float(partial_array(query.u, query.v, query.t, side, params))


def eta_mixed_partial(query: IntervalExitQuery, params: SeriesParams = None) -> float:
    """Mixed partial d^2/(du dv) of the survival probability."""
    return float(mixed_partial_array(query.u, query.v, query.t, params))
