"""
Survival probabilities and exit-time densities of Brownian motion.

Domains whose exit time is a minimum of independent one-dimensional exit
times (intervals, one-dimensional balls, slabs and rectangles) have an
analytic law built from the interval series; every other domain is
handled by sampling.
"""

import logging
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from common.estimates import EstimateMethod, EstimateWithError, estimate_from_samples
from common.exceptions import CapabilityError, DomainError
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import validate_count, validate_nonnegative, validate_positive
from domains.shapes import Ball, BaseDomain, Interval, Rectangle, Slab, as_start
from series_engine import SeriesParams, density_array, survival_array
from bm_exit.batch import ExitTimeSampleBatch, SamplingScheme
from bm_exit.euler import sample_exit_domain
from bm_exit.interval import invert_survival

logger = logging.getLogger(__name__)


class SurvivalMethod(str, Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte-carlo"


def has_analytic_law(domain: BaseDomain) -> bool:
    """True when tau_D is a minimum of independent interval exit times."""
    if isinstance(domain, Ball):
        return domain.dimension == 1
    return isinstance(domain, (Interval, Slab, Rectangle))


def analytic_factors(domain: BaseDomain, z) -> List[Tuple[float, float]]:
    """
    Distances (u, v) to the two ends of each independent exit coordinate.

    Raises:
        CapabilityError: If the domain has no analytic exit law
        PreconditionError: If z is not strictly inside
    """
    point = as_start(z).validate_in(domain)

    if isinstance(domain, Interval):
        return [(point[0] - domain.a, domain.b - point[0])]
    if isinstance(domain, Ball) and domain.dimension == 1:
        c, r = domain.center[0], domain.radius
        return [(point[0] - (c - r), c + r - point[0])]
    if isinstance(domain, Slab):
        h = domain.half_width
        return [(point[-1] + h, h - point[-1])]
    if isinstance(domain, Rectangle):
        return [
            (point[0] - domain.xmin, domain.xmax - point[0]),
            (point[1] - domain.ymin, domain.ymax - point[1]),
        ]

    raise CapabilityError(f"No analytic exit law for {domain.shape} in R^{domain.dimension}")


def analytic_survival(domain: BaseDomain, z, t, params: SeriesParams = None) -> np.ndarray:
    """P_z[tau_D > t] over an array of t, product over exit coordinates."""
    out = np.ones(np.shape(t))
    for u, v in analytic_factors(domain, z):
        out = out * survival_array(u, v, t, params)
    return out


def analytic_density(domain: BaseDomain, z, t, params: SeriesParams = None) -> np.ndarray:
    """Density of tau_D at t > 0 by the product rule over exit coordinates."""
    factors = analytic_factors(domain, z)
    survivals = [survival_array(u, v, t, params) for u, v in factors]
    densities = [density_array(u, v, t, params) for u, v in factors]

    out = np.zeros(np.shape(t))
    for i, density in enumerate(densities):
        term = density
        for j, survival in enumerate(survivals):
            if j != i:
                term = term * survival
        out = out + term
    return out


def exit_density(domain: BaseDomain, z, t: float, params: SeriesParams = None) -> float:
    """
    Density f of tau_D started at z, evaluated at t > 0.

    Raises:
        CapabilityError: If the domain has no analytic exit law
    """
    t = validate_positive(t, "t")
    return float(analytic_density(domain, z, t, params))


def sample_exit_times(
    domain: BaseDomain,
    z,
    count: int,
    stream: RandomStream,
    dt: Optional[float] = None,
    params: SeriesParams = None,
    workers: int = None,
) -> ExitTimeSampleBatch:
    """
    Draw exit times with the most accurate available sampler.

    Domains with an analytic law are sampled exactly (a rectangle as the
    minimum of two independent interval draws); other domains use the
    Euler-bridge scheme with step dt.
    """
    if not has_analytic_law(domain):
        return sample_exit_domain(domain, z, dt, count, stream, workers)

    start = as_start(z)
    factors = analytic_factors(domain, start)
    count = validate_count(count)

    def fill(gen: np.random.Generator, n: int) -> np.ndarray:
        times = np.full(n, np.inf)
        for u, v in factors:
            times = np.minimum(times, invert_survival(u, v, 1.0 - gen.random(n), params))
        return times

    times = fill_chunks(stream, count, fill, workers or default_workers())
    return ExitTimeSampleBatch(
        times=times,
        domain=domain,
        start=start,
        scheme=SamplingScheme.EXACT_INVERSION,
        stream=stream,
    )


def survival_from_batch(batch: ExitTimeSampleBatch, t: float) -> EstimateWithError:
    """Fraction of the batch surviving past t, with its binomial standard error."""
    return estimate_from_samples(batch.times > t, EstimateMethod.MONTE_CARLO)


def bm_survival(
    domain: BaseDomain,
    z,
    t: float,
    method: SurvivalMethod = SurvivalMethod.ANALYTIC,
    count: int = None,
    dt: Optional[float] = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
    workers: int = None,
) -> EstimateWithError:
    """
    Survival probability P_z[tau_D > t] of Brownian motion.

    Args:
        domain: Domain D
        z: Start point inside D
        t: Time, t >= 0
        method: analytic or monte-carlo
        count: Monte Carlo sample count
        dt: Euler step for sampled domains
        stream: Random stream for Monte Carlo
        params: Series truncation controls

    Returns:
        EstimateWithError; analytic values carry the series tolerance as error

    Raises:
        CapabilityError: If analytic is requested for an unsupported shape
        PreconditionError: If z is not strictly inside
    """
    method = SurvivalMethod(method)
    start = as_start(z)
    start.validate_in(domain)
    t = validate_nonnegative(t, "t")
    params = params if params is not None else SeriesParams()

    if method == SurvivalMethod.ANALYTIC:
        factors = analytic_factors(domain, start)
        value = float(analytic_survival(domain, start, t, params))
        return EstimateWithError.exact(value, error=len(factors) * params.abs_tol)

    if stream is None:
        raise DomainError("monte-carlo survival needs a random stream")
    batch = sample_exit_times(domain, start, count or 100_000, stream, dt, params, workers)
    return survival_from_batch(batch, t)
