"""
Exact sampling of interval exit times by inverting the survival function.

A draw solves P_0[eta_(-u,v) > t] = U for U uniform on (0, 1]. The root
is bracketed in log t, narrowed by bisection and polished with Newton
steps that use the exit density, falling back to bisection whenever a
Newton step leaves the bracket.
"""

import logging
import math

import numpy as np

from common.exceptions import AccuracyError, DomainError, PreconditionError
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import validate_count, validate_finite
from domains.shapes import Interval, StartPoint
from series_engine import SeriesParams, density_array, survival_array
from bm_exit.batch import ExitTimeSampleBatch, SamplingScheme

logger = logging.getLogger(__name__)

# Target accuracy of each draw, measured in probability
INVERSION_TOL = 1e-10
_BISECTION_STEPS = 40
_NEWTON_STEPS = 30
_MAX_BRACKET_STEPS = 200


def _bracket(u: float, v: float, target: np.ndarray, params: SeriesParams):
    """log-time brackets with S(exp(lo)) >= target >= S(exp(hi))."""
    scale = math.log((u + v) ** 2)
    lo = np.full(target.shape, scale - 2.0)
    hi = np.full(target.shape, scale)

    for _ in range(_MAX_BRACKET_STEPS):
        low_bad = survival_array(u, v, np.exp(lo), params) < target
        high_bad = survival_array(u, v, np.exp(hi), params) > target
        if not (low_bad.any() or high_bad.any()):
            return lo, hi
        lo = np.where(low_bad, lo - 2.0, lo)
        hi = np.where(high_bad, hi + 1.0, hi)

    raise AccuracyError("Could not bracket the exit-time quantile", achieved_bound=1.0)


def invert_survival(u: float, v: float, uniforms: np.ndarray, params: SeriesParams = None) -> np.ndarray:
    """
    Exit times of (-u, v) from 0 at survival levels `uniforms`.

    Args:
        u: Distance to the left endpoint
        v: Distance to the right endpoint
        uniforms: Survival levels in (0, 1]

    Returns:
        Times t > 0 with |P_0[eta > t] - U| <= INVERSION_TOL
    """
    params = params if params is not None else SeriesParams()
    target = np.asarray(uniforms, dtype=float)
    lo, hi = _bracket(u, v, target, params)

    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        above = survival_array(u, v, np.exp(mid), params) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)

    t = np.exp(0.5 * (lo + hi))
    t_lo, t_hi = np.exp(lo), np.exp(hi)
    for _ in range(_NEWTON_STEPS):
        gap = survival_array(u, v, t, params) - target
        if np.all(np.abs(gap) <= INVERSION_TOL):
            break
        t_lo = np.where(gap > 0, t, t_lo)
        t_hi = np.where(gap > 0, t_hi, t)
        density = density_array(u, v, t, params)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t + gap / density
        inside = np.isfinite(newton) & (newton > t_lo) & (newton < t_hi)
        t = np.where(inside, newton, np.sqrt(t_lo * t_hi))
    else:
        # a flat survival curve near 0 or 1 can leave the gap above tolerance
        # while the bracket has already collapsed to adjacent floats
        logger.debug("Newton polish stopped at the step limit for u=%g v=%g", u, v)

    return t


def sample_exit_interval(
    a: float,
    b: float,
    z: float,
    count: int,
    stream: RandomStream,
    params: SeriesParams = None,
    workers: int = None,
) -> ExitTimeSampleBatch:
    """
    Draw exit times of Brownian motion from (a, b) started at z.

    Args:
        a: Left endpoint
        b: Right endpoint
        z: Start point
        count: Number of draws
        stream: Random stream keying the per-chunk generators
        params: Series truncation controls
        workers: Thread count; does not change the draws

    Returns:
        Batch of exact exit times

    Raises:
        DomainError: If a >= b or count < 1
        PreconditionError: If z is not strictly inside (a, b)
    """
    a, b, z = (validate_finite(x, name) for x, name in ((a, "a"), (b, "b"), (z, "z")))
    if a >= b:
        raise DomainError("interval requires a < b", {"a": a, "b": b})
    if not a < z < b:
        raise PreconditionError("start point must lie strictly inside (a, b)", {"a": a, "b": b, "z": z})
    count = validate_count(count)
    u, v = z - a, b - z

    def fill(gen: np.random.Generator, n: int) -> np.ndarray:
        return invert_survival(u, v, 1.0 - gen.random(n), params)

    times = fill_chunks(stream, count, fill, workers or default_workers())
    return ExitTimeSampleBatch(
        times=times,
        domain=Interval(a=a, b=b),
        start=StartPoint(z=[z]),
        scheme=SamplingScheme.EXACT_INVERSION,
        stream=stream,
    )
