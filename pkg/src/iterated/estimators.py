"""
Survival and moments of the exit time of iterated processes.

For IBM, Z stays in D up to time t exactly when the outer motion on each
side of the inner path outlives the inner path's excursion on that side,
so with outer exit times (tau-, tau+) independent of the inner path

    P_z[tau_D(Z) > t] = E[ P_0[eta_(-tau-, tau+) > t] ].

BTBM uses one outer exit time on both sides. The conditional estimator
averages the interval series over sampled outer exit times, quadrature
integrates the same expression against the analytic outer density, and
the pathwise estimator simulates the inner path and its extremes.
"""

import logging
import math
from typing import Any, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.estimates import EstimateMethod, EstimateWithError, estimate_from_samples
from common.exceptions import DomainError, PreconditionError, ValidationException
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import validate_grid
from bm_exit import sample_exit_times
from domains.shapes import BaseDomain, StartPoint, as_start
from series_engine import SeriesParams, moment_array, survival_array
from iterated.quadrature import legendre_rule, outer_law_rule
from iterated.query import (
    QUADRATURE_TAIL,
    EstimatorSettings,
    IteratedQuery,
    ProcessKind,
    SurvivalEstimator,
)

logger = logging.getLogger(__name__)

_PHI_NODES = 8


def _require_stream(stream: Optional[RandomStream], what: str) -> RandomStream:
    if stream is None:
        raise DomainError(f"{what} needs a random stream")
    return stream


def draw_outer_times(
    domain: BaseDomain,
    start: StartPoint,
    process: ProcessKind,
    settings: EstimatorSettings,
    stream: RandomStream,
    params: SeriesParams = None,
) -> np.ndarray:
    """
    Outer exit times, one column per independent outer motion.

    Returns:
        Array of shape (count, 2) holding (tau-, tau+) for IBM, or
        (count, 1) holding tau for BTBM
    """
    columns = []
    for side in range(process.outer_count):
        batch = sample_exit_times(
            domain, start, settings.count, stream.substream(side), settings.dt, params, settings.workers
        )
        columns.append(batch.times)
    return np.column_stack(columns)


def _sides(outer: np.ndarray):
    """(u, v) half-widths of the eta interval for each outer draw."""
    return outer[:, 0], outer[:, -1]


def inner_extremes(
    t_grid: np.ndarray,
    dt_y: float,
    count: int,
    stream: RandomStream,
    workers: int = None,
) -> np.ndarray:
    """
    Running maximum and negated minimum of a Brownian path at each grid time.

    Each step of length h <= dt_y draws the Gaussian increment and then the
    bridge maximum and minimum exactly given the endpoints,

        M = (y0 + y1 + sqrt((y1 - y0)^2 - 2 h ln U)) / 2,

    the two extremes of one step using independent uniforms.

    Returns:
        Array of shape (count, len(t_grid), 2) with (sup Y, -inf Y) over [0, t]
    """
    grid = np.asarray(t_grid, dtype=float)

    def fill(gen: np.random.Generator, n: int) -> np.ndarray:
        out = np.empty((n, grid.size, 2))
        y = np.zeros(n)
        top = np.zeros(n)
        bottom = np.zeros(n)
        previous = 0.0
        for k, t in enumerate(grid):
            span = t - previous
            if span > 0:
                steps = math.ceil(span / dt_y)
                h = span / steps
                for _ in range(steps):
                    y_next = y + math.sqrt(h) * gen.standard_normal(n)
                    jump = (y_next - y) ** 2
                    spread_top = np.sqrt(jump - 2.0 * h * np.log1p(-gen.random(n)))
                    spread_bottom = np.sqrt(jump - 2.0 * h * np.log1p(-gen.random(n)))
                    top = np.maximum(top, 0.5 * (y + y_next + spread_top))
                    bottom = np.minimum(bottom, 0.5 * (y + y_next - spread_bottom))
                    y = y_next
            out[:, k, 0] = top
            out[:, k, 1] = -bottom
            previous = t
        return out

    return fill_chunks(stream, count, fill, workers or default_workers())


def _conditional_curve(outer: np.ndarray, t_grid: np.ndarray, params: SeriesParams) -> List[EstimateWithError]:
    u, v = _sides(outer)
    return [
        estimate_from_samples(survival_array(u, v, t, params), EstimateMethod.CONDITIONAL)
        for t in t_grid
    ]


def _quadrature_curve(
    domain: BaseDomain,
    start: StartPoint,
    process: ProcessKind,
    t_grid: np.ndarray,
    settings: EstimatorSettings,
    params: SeriesParams,
) -> List[EstimateWithError]:
    params = params if params is not None else SeriesParams()
    coarse = outer_law_rule(domain, start, settings.quadrature_order, params)
    fine = outer_law_rule(domain, start, 2 * settings.quadrature_order, params)

    def integrate(rule, t: float) -> float:
        x, w = rule.nodes, rule.density_weights
        if process == ProcessKind.BTBM:
            return float(w @ survival_array(x, x, t, params))
        return float(w @ survival_array(x[:, None], x[None, :], t, params) @ w)

    results = []
    tail = process.outer_count * QUADRATURE_TAIL
    for t in t_grid:
        if t == 0:
            results.append(EstimateWithError.exact(1.0))
            continue
        value = integrate(fine, t)
        delta = abs(value - integrate(coarse, t))
        results.append(
            EstimateWithError(
                value=value,
                std_error=delta + tail + params.abs_tol,
                n_samples=0,
                method=EstimateMethod.QUADRATURE,
            )
        )
    return results


def _pathwise_curve(
    outer: np.ndarray,
    t_grid: np.ndarray,
    settings: EstimatorSettings,
    stream: RandomStream,
) -> List[EstimateWithError]:
    extremes = inner_extremes(t_grid, settings.dt_y, outer.shape[0], stream, settings.workers)
    u, v = _sides(outer)
    results = []
    for k in range(t_grid.size):
        above, below = extremes[:, k, 0], extremes[:, k, 1]
        alive = (v > above) & (u > below)
        results.append(estimate_from_samples(alive, EstimateMethod.PATHWISE))
    return results


def iterated_survival_curve(
    domain: BaseDomain,
    start: StartPoint,
    process: ProcessKind,
    t_grid: Sequence[float],
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> List[EstimateWithError]:
    """
    Survival estimates of tau_D(Z) (IBM) or tau_D(Z^1) (BTBM) on a time grid.

    All grid times share one draw of outer exit times, and for the
    pathwise method one set of inner paths.

    Args:
        domain: Domain D
        start: Start point inside D
        process: IBM or BTBM
        t_grid: Nonnegative times
        settings: Estimator choice and controls
        stream: Random stream for sampling estimators
        params: Series truncation controls

    Returns:
        One EstimateWithError per grid time

    Raises:
        CapabilityError: If quadrature is requested without an analytic outer density
        DomainError: If a time is negative
    """
    settings = settings if settings is not None else EstimatorSettings()
    process = ProcessKind(process)
    grid = validate_grid(t_grid, "t_grid", nonnegative=True)
    start = as_start(start)
    start.validate_in(domain)
    logger.debug("%s survival on %d times with %s", process.value, grid.size, settings.method.value)

    if settings.method == SurvivalEstimator.QUADRATURE:
        return _quadrature_curve(domain, start, process, grid, settings, params)

    stream = _require_stream(stream, f"{settings.method.value} estimator")
    outer = draw_outer_times(domain, start, process, settings, stream, params)
    if settings.method == SurvivalEstimator.CONDITIONAL:
        return _conditional_curve(outer, grid, params)

    ordered = np.argsort(grid, kind="stable")
    curve = _pathwise_curve(outer, grid[ordered], settings, stream.substream(2))
    results: List[EstimateWithError] = [None] * grid.size
    for position, index in enumerate(ordered):
        results[index] = curve[position]
    return results


def _single_time(query: IteratedQuery, expected: ProcessKind) -> float:
    if query.process != expected:
        raise PreconditionError(f"query is for {query.process.value}, not {expected.value}")
    if query.t is None:
        raise DomainError("survival query needs a time t")
    return query.t


def ibm_survival(
    query: IteratedQuery,
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> EstimateWithError:
    """P_z[tau_D(Z) > t] for iterated Brownian motion; t = 0 gives exactly 1."""
    t = _single_time(query, ProcessKind.IBM)
    if t == 0:
        return EstimateWithError.exact(1.0)
    return iterated_survival_curve(query.domain, query.start, query.process, [t], settings, stream, params)[0]


def btbm_survival(
    query: IteratedQuery,
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> EstimateWithError:
    """P_z[tau_D(Z^1) > t] for Brownian-time Brownian motion; t = 0 gives exactly 1."""
    t = _single_time(query, ProcessKind.BTBM)
    if t == 0:
        return EstimateWithError.exact(1.0)
    return iterated_survival_curve(query.domain, query.start, query.process, [t], settings, stream, params)[0]


def ibm_survival_curve(
    domain: BaseDomain,
    start: Any,
    t_grid: Sequence[float],
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> List[EstimateWithError]:
    """P_z[tau_D(Z) > t] on a time grid for iterated Brownian motion."""
    return iterated_survival_curve(domain, start, ProcessKind.IBM, t_grid, settings, stream, params)


def btbm_survival_curve(
    domain: BaseDomain,
    start: Any,
    t_grid: Sequence[float],
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> List[EstimateWithError]:
    """P_z[tau_D(Z^1) > t] on a time grid for Brownian-time Brownian motion."""
    return iterated_survival_curve(domain, start, ProcessKind.BTBM, t_grid, settings, stream, params)


def iterated_moment(
    query: IteratedQuery,
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> EstimateWithError:
    """
    E_z[tau^p] for the exit time of IBM or BTBM.

    Averages the interval moment E_0[eta_(-u,v)^p] over sampled outer
    exit times (u, v) = (tau-, tau+), or (tau, tau) for BTBM.

    Raises:
        DomainError: If the query carries no moment order
    """
    if query.p is None:
        raise DomainError("moment query needs an order p")
    settings = settings if settings is not None else EstimatorSettings()
    stream = _require_stream(stream, "iterated moment")

    outer = draw_outer_times(query.domain, query.start, query.process, settings, stream, params)
    return moment_from_outer(outer, query.p, params)


def moment_from_outer(outer: np.ndarray, p: float, params: SeriesParams = None) -> EstimateWithError:
    """Conditional moment estimate from already drawn outer exit times."""
    u, v = _sides(outer)
    return estimate_from_samples(moment_array(u, v, p, params), EstimateMethod.CONDITIONAL)


class TabulatedPhi(BaseModel):
    """
    Nondecreasing nonnegative function given at increasing points.

    Interpolated linearly between points and held constant outside them.
    """

    points: List[float] = Field(min_length=2)
    values: List[float] = Field(min_length=2)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_monotone(self) -> "TabulatedPhi":
        points = np.asarray(self.points, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if points.shape != values.shape:
            raise ValidationException("phi needs one value per point")
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(values))):
            raise ValidationException("phi table must be finite")
        if np.any(points < 0) or np.any(np.diff(points) <= 0):
            raise ValidationException("phi points must be nonnegative and strictly increasing")
        if np.any(values < 0) or np.any(np.diff(values) < 0):
            raise ValidationException("phi must be nonnegative and nondecreasing", {"values": self.values})
        return self

    def __call__(self, t) -> np.ndarray:
        return np.interp(t, self.points, self.values)


def phi_moment(
    query: IteratedQuery,
    phi: TabulatedPhi,
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    params: SeriesParams = None,
) -> EstimateWithError:
    """
    E_z[phi(tau)] for IBM or BTBM from one draw of outer exit times.

    Raises:
        DomainError: If no random stream is given
    """
    settings = settings if settings is not None else EstimatorSettings()
    stream = _require_stream(stream, "phi moment")

    outer = draw_outer_times(query.domain, query.start, query.process, settings, stream, params)
    return phi_from_outer(outer, phi, params)


def phi_from_outer(outer: np.ndarray, phi: TabulatedPhi, params: SeriesParams = None) -> EstimateWithError:
    """
    E[phi(tau)] = phi(t_0) + integral of phi'(t) P[tau > t] dt per outer draw.

    The integral runs over the table segments with a Gauss-Legendre rule per
    segment, applied to the conditional survival of each outer draw.
    """
    u, v = _sides(outer)

    x, w = legendre_rule(_PHI_NODES)
    points = np.asarray(phi.points, dtype=float)
    values = np.asarray(phi.values, dtype=float)
    per_sample = np.full(u.shape, values[0])
    for left, right, rise in zip(points[:-1], points[1:], np.diff(values)):
        if rise == 0:
            continue
        half = 0.5 * (right - left)
        for node, weight in zip(left + half * (x + 1.0), half * w):
            per_sample += rise / (right - left) * weight * survival_array(u, v, node, params)

    return estimate_from_samples(per_sample, EstimateMethod.CONDITIONAL)
