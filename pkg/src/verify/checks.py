"""
Isoperimetric-type inequality checks.

Each check evaluates lhs for the domain D at every start point z and
rhs for the comparison domain D_* started at the origin, on independent
random streams, and judges every cell with the flag rule of
verify.report.
"""

import logging
from functools import partial
from typing import Any, List, Optional, Sequence

import numpy as np

from common.estimates import EstimateWithError
from common.exceptions import PreconditionError
from common.streams import RandomStream
from common.validators import validate_grid
from bm_exit import analytic_survival, has_analytic_law, sample_exit_times, survival_from_batch
from domains import BaseDomain, ComparisonKind, StartPoint, as_start, canonical_start, symmetrize
from iterated import (
    EstimatorSettings,
    ProcessKind,
    SurvivalEstimator,
    TabulatedPhi,
    draw_outer_times,
    iterated_survival_curve,
    moment_from_outer,
    phi_from_outer,
)
from series_engine import SeriesParams, survival_array
from verify.report import (
    CONFIRMATION_FACTOR,
    DEFAULT_K,
    FLAG_ABS_TOL,
    VerificationReport,
    build_record,
    format_point,
)

logger = logging.getLogger(__name__)

# Stream offsets: rhs, lhs per start point, confirmation reruns per cell
_RHS_STREAM = 1
_LHS_STREAM = 100
_RERUN_STREAM = 10_000


def _substream(stream: Optional[RandomStream], offset: int) -> Optional[RandomStream]:
    return None if stream is None else stream.substream(offset)


def _start_points(domain: BaseDomain, z_grid: Optional[Sequence[Any]]) -> List[StartPoint]:
    if z_grid is None:
        z_grid = [domain.incenter()]
    points = [as_start(z) for z in z_grid]
    if not points:
        raise PreconditionError("z_grid must not be empty")
    for point in points:
        point.validate_in(domain)
    return points


def _comparison(domain: BaseDomain, comparison: ComparisonKind) -> BaseDomain:
    comparison = ComparisonKind(comparison)
    if comparison == ComparisonKind.INTERVAL_I and domain.dimension != 1:
        raise PreconditionError("interval-I compares one-dimensional domains only")
    return symmetrize(domain, comparison)


def _settings_for(settings: EstimatorSettings, domain: BaseDomain) -> EstimatorSettings:
    """Falls back to the conditional estimator where quadrature has no density."""
    if settings.method == SurvivalEstimator.QUADRATURE and not has_analytic_law(domain):
        logger.info("No analytic exit density for %s; using the conditional estimator", domain.shape)
        return settings.model_copy(update={"method": SurvivalEstimator.CONDITIONAL})
    return settings


def _scaled(settings: EstimatorSettings) -> EstimatorSettings:
    return settings.model_copy(update={"count": settings.count * CONFIRMATION_FACTOR})


def _rerun_survival(domain, start, star, origin, process, t, settings, stream, cell, params):
    bigger = _scaled(settings)
    offset = _RERUN_STREAM + 2 * cell
    lhs = iterated_survival_curve(
        domain, start, process, [t], _settings_for(bigger, domain), _substream(stream, offset), params
    )[0]
    rhs = iterated_survival_curve(
        star, origin, process, [t], _settings_for(bigger, star), _substream(stream, offset + 1), params
    )[0]
    return lhs, rhs


def check_isoperimetric(
    domain: BaseDomain,
    process: ProcessKind,
    comparison: ComparisonKind,
    z_grid: Sequence[Any],
    t_grid: Sequence[float],
    settings: EstimatorSettings = None,
    stream: RandomStream = None,
    k: float = DEFAULT_K,
    params: SeriesParams = None,
    confirm: bool = True,
) -> VerificationReport:
    """
    Check P_z[tau_D > t] <= P_0[tau_{D_*} > t] for IBM or BTBM.

    Args:
        domain: Domain D
        process: IBM or BTBM
        comparison: equal-volume-ball, slab-S or lens-C
        z_grid: Start points in D
        t_grid: Nonnegative times
        settings: Estimator used on both sides
        stream: Random stream; sides and reruns use independent substreams
        k: Standard errors of slack in the flag rule
        params: Series truncation controls
        confirm: Rerun flagged cells at four times the samples

    Returns:
        One record per (z, t)

    Raises:
        PreconditionError: If the comparison is inadmissible for D
    """
    settings = settings if settings is not None else EstimatorSettings()
    process = ProcessKind(process)
    comparison = ComparisonKind(comparison)
    star = _comparison(domain, comparison)
    origin = as_start(canonical_start(star))
    grid = validate_grid(t_grid, "t_grid", nonnegative=True)
    points = _start_points(domain, z_grid)

    logger.info(
        "Checking %s survival: %s vs %s on %d x %d cells",
        process.value, domain.shape, comparison.value, len(points), grid.size,
    )
    rhs_curve = iterated_survival_curve(
        star, origin, process, grid, _settings_for(settings, star), _substream(stream, _RHS_STREAM), params
    )

    records = []
    for i, start in enumerate(points):
        lhs_curve = iterated_survival_curve(
            domain, start, process, grid, _settings_for(settings, domain),
            _substream(stream, _LHS_STREAM + i), params,
        )
        for j, t in enumerate(grid):
            cell = len(records)
            rerun = None
            if confirm:
                rerun = partial(
                    _rerun_survival, domain, start, star, origin, process, float(t),
                    settings, stream, cell, params,
                )
            records.append(
                build_record(
                    cell, f"z={format_point(start.z)} t={t:g}", lhs_curve[j], rhs_curve[j],
                    k, FLAG_ABS_TOL, rerun, z=start.z, t=float(t),
                )
            )

    report = VerificationReport(
        name=f"isoperimetric {process.value} {domain.shape} vs {comparison.value}", k=k, records=records
    )
    logger.info(report.summary_text())
    return report


def _rerun_moment(domain, start, star, origin, process, measure, settings, stream, cell, params):
    bigger = _scaled(settings)
    offset = _RERUN_STREAM + 2 * cell
    lhs = measure(draw_outer_times(domain, start, process, bigger, stream.substream(offset), params))
    rhs = measure(draw_outer_times(star, origin, process, bigger, stream.substream(offset + 1), params))
    return lhs, rhs


def check_moments(
    domain: BaseDomain,
    process: ProcessKind,
    comparison: ComparisonKind,
    p_list: Optional[Sequence[float]],
    stream: RandomStream,
    z_grid: Optional[Sequence[Any]] = None,
    settings: EstimatorSettings = None,
    k: float = DEFAULT_K,
    params: SeriesParams = None,
    confirm: bool = True,
    phi: Optional[TabulatedPhi] = None,
) -> VerificationReport:
    """
    Check E_z[tau_D^p] <= E_0[tau_{D_*}^p] for IBM or BTBM.

    Every order p, and phi when given, shares one draw of outer exit times
    per side; phi adds the cell E_z[phi(tau_D)] <= E_0[phi(tau_{D_*})].
    z_grid defaults to the incenter of D.

    Raises:
        PreconditionError: If the comparison is inadmissible for D, or
            neither orders nor phi are given
        DomainError: If some p < 1
    """
    settings = settings if settings is not None else EstimatorSettings()
    process = ProcessKind(process)
    comparison = ComparisonKind(comparison)
    if not p_list and phi is None:
        raise PreconditionError("moments check needs orders p or a phi table")
    star = _comparison(domain, comparison)
    origin = as_start(canonical_start(star))
    orders = validate_grid(p_list, "p_list") if p_list else np.empty(0)
    points = _start_points(domain, z_grid)

    measures = [(f"p={p:g}", {"p": float(p)}, partial(moment_from_outer, p=float(p), params=params)) for p in orders]
    if phi is not None:
        measures.append(("phi", {}, partial(phi_from_outer, phi=phi, params=params)))

    rhs_outer = draw_outer_times(star, origin, process, settings, stream.substream(_RHS_STREAM), params)
    rhs = [measure(rhs_outer) for _, _, measure in measures]

    records = []
    for i, start in enumerate(points):
        lhs_outer = draw_outer_times(domain, start, process, settings, stream.substream(_LHS_STREAM + i), params)
        for j, (name, coordinates, measure) in enumerate(measures):
            cell = len(records)
            rerun = None
            if confirm:
                rerun = partial(
                    _rerun_moment, domain, start, star, origin, process, measure, settings, stream, cell, params
                )
            records.append(
                build_record(
                    cell, f"z={format_point(start.z)} {name}", measure(lhs_outer), rhs[j],
                    k, FLAG_ABS_TOL, rerun, z=start.z, **coordinates,
                )
            )

    report = VerificationReport(
        name=f"moments {process.value} {domain.shape} vs {comparison.value}", k=k, records=records
    )
    logger.info(report.summary_text())
    return report


def _bm_survival_curve(
    domain: BaseDomain,
    start: StartPoint,
    grid: np.ndarray,
    count: int,
    dt: Optional[float],
    stream: Optional[RandomStream],
    params: SeriesParams,
) -> List[EstimateWithError]:
    if has_analytic_law(domain):
        abs_tol = (params or SeriesParams()).abs_tol
        values = analytic_survival(domain, start, grid, params)
        return [EstimateWithError.exact(float(value), error=2 * abs_tol) for value in values]
    if stream is None:
        raise PreconditionError(f"sampling {domain.shape} exit times needs a random stream")
    batch = sample_exit_times(domain, start, count, stream, dt, params)
    return [survival_from_batch(batch, t) for t in grid]


def _rerun_brownian(domain, start, star, origin, t, count, dt, stream, cell, params):
    offset = _RERUN_STREAM + 2 * cell
    grid = np.array([t])
    lhs = _bm_survival_curve(domain, start, grid, count * CONFIRMATION_FACTOR, dt, _substream(stream, offset), params)
    rhs = _bm_survival_curve(star, origin, grid, count * CONFIRMATION_FACTOR, dt, _substream(stream, offset + 1), params)
    return lhs[0], rhs[0]


def check_brownian_isoperimetric(
    domain: BaseDomain,
    comparison: ComparisonKind,
    z_grid: Sequence[Any],
    t_grid: Sequence[float],
    count: int = 100_000,
    dt: Optional[float] = None,
    stream: RandomStream = None,
    k: float = DEFAULT_K,
    params: SeriesParams = None,
    confirm: bool = True,
) -> VerificationReport:
    """
    Check P_z[tau_D > t] <= P_0[tau_{D_*} > t] for Brownian motion itself.

    Domains with an analytic exit law are evaluated exactly; others are
    sampled with `count` draws per start point.
    """
    comparison = ComparisonKind(comparison)
    star = _comparison(domain, comparison)
    origin = as_start(canonical_start(star))
    grid = validate_grid(t_grid, "t_grid", nonnegative=True)
    points = _start_points(domain, z_grid)

    rhs_curve = _bm_survival_curve(star, origin, grid, count, dt, _substream(stream, _RHS_STREAM), params)
    records = []
    for i, start in enumerate(points):
        lhs_curve = _bm_survival_curve(domain, start, grid, count, dt, _substream(stream, _LHS_STREAM + i), params)
        for j, t in enumerate(grid):
            cell = len(records)
            rerun = None
            if confirm:
                rerun = partial(_rerun_brownian, domain, start, star, origin, float(t), count, dt, stream, cell, params)
            records.append(
                build_record(
                    cell, f"z={format_point(start.z)} t={t:g}", lhs_curve[j], rhs_curve[j],
                    k, FLAG_ABS_TOL, rerun, z=start.z, t=float(t),
                )
            )

    report = VerificationReport(name=f"brownian {domain.shape} vs {comparison.value}", k=k, records=records)
    logger.info(report.summary_text())
    return report


def check_interval_monotonicity(
    u_grid: Sequence[float],
    t_grid: Sequence[float],
    params: SeriesParams = None,
    k: float = DEFAULT_K,
) -> VerificationReport:
    """
    Check that P_0[eta_(-u,v) > t] grows with the interval.

    Cells compare consecutive grid values u_i < u_{i+1}: the symmetric
    interval (-u, u), and the left end u at every fixed right end v from
    the same grid.
    """
    params = params if params is not None else SeriesParams()
    widths = validate_grid(u_grid, "u_grid", strictly_increasing=True)
    if np.any(widths <= 0):
        raise PreconditionError("u_grid must be positive")
    grid = validate_grid(t_grid, "t_grid", nonnegative=True)

    def exact(u, v, t) -> EstimateWithError:
        return EstimateWithError.exact(float(survival_array(u, v, t, params)), error=params.abs_tol)

    records = []
    for t in grid:
        for small, large in zip(widths[:-1], widths[1:]):
            records.append(
                build_record(
                    len(records), f"symmetric u={small:g}->{large:g} t={t:g}",
                    exact(small, small, t), exact(large, large, t), k, params.abs_tol, t=float(t),
                )
            )
            for v in widths:
                records.append(
                    build_record(
                        len(records), f"left u={small:g}->{large:g} v={v:g} t={t:g}",
                        exact(small, v, t), exact(large, v, t), k, params.abs_tol, t=float(t),
                    )
                )

    report = VerificationReport(name="interval monotonicity", k=k, records=records)
    logger.info(report.summary_text())
    return report
