"""
Tests for Brownian exit-time sampling and survival.
"""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from common.estimates import EstimateMethod
from common.exceptions import AccuracyError, CapabilityError, DomainError, PreconditionError
from domains import Ball, Interval, Rectangle, Slab, StartPoint
from bm_exit import (
    ExitTimeSampleBatch,
    SamplingScheme,
    SurvivalMethod,
    analytic_factors,
    analytic_survival,
    bm_survival,
    crossing_probability,
    default_dt,
    empirical_exit_law,
    exit_density,
    has_analytic_law,
    sample_exit_domain,
    sample_exit_interval,
    sample_exit_times,
    survival_from_batch,
)
from series_engine import survival_array

UNIT_SQUARE = Rectangle(xmin=-1, xmax=1, ymin=-1, ymax=1)


def _within(sample: np.ndarray, expected: float, k: float = 4.0) -> bool:
    se = np.std(sample, ddof=1) / math.sqrt(sample.size)
    return abs(sample.mean() - expected) < k * se


def test_interval_mean_exit_time(stream):
    """Mean exit time of (-1, 1) from 0 is 1"""
    batch = sample_exit_interval(-1.0, 1.0, 0.0, 20_000, stream)
    assert batch.count == 20_000
    assert batch.scheme == SamplingScheme.EXACT_INVERSION
    assert _within(batch.times, 1.0)


def test_interval_mean_near_boundary(stream):
    """Mean exit time from 0.999 is (0.999 + 1)(1 - 0.999)"""
    batch = sample_exit_interval(-1.0, 1.0, 0.999, 20_000, stream)
    assert _within(batch.times, 1.999 * 0.001)


def test_interval_draws_follow_analytic_law(stream):
    """Exact draws pass a Kolmogorov-Smirnov test against the series"""
    batch = sample_exit_interval(-0.5, 1.5, 0.0, 5_000, stream)
    result = stats.kstest(batch.times, lambda t: 1.0 - survival_array(0.5, 1.5, t))
    assert result.pvalue > 1e-3


def test_interval_scaling_in_law(stream):
    """tau of (-2, 2) is 4 times tau of (-1, 1) in law"""
    wide = sample_exit_interval(-2.0, 2.0, 0.0, 5_000, stream.substream(0)).times / 4.0
    narrow = sample_exit_interval(-1.0, 1.0, 0.0, 5_000, stream.substream(1)).times
    assert stats.ks_2samp(wide, narrow).pvalue > 1e-3


def test_interval_sampling_reproducible(stream):
    """Same stream gives identical draws for any worker count"""
    small = stream.model_copy(update={"chunk_size": 300})
    first = sample_exit_interval(-1.0, 2.0, 0.5, 1_000, small, workers=1)
    second = sample_exit_interval(-1.0, 2.0, 0.5, 1_000, small, workers=4)
    assert np.array_equal(first.times, second.times)


def test_interval_sampler_errors(stream):
    with pytest.raises(DomainError):
        sample_exit_interval(1.0, -1.0, 0.0, 10, stream)
    with pytest.raises(PreconditionError):
        sample_exit_interval(-1.0, 1.0, 1.0, 10, stream)
    with pytest.raises(DomainError):
        sample_exit_interval(-1.0, 1.0, 0.0, 0, stream)


def test_crossing_probability_single_face():
    """A step near one face crosses with probability exp(-2 d0 d1 / dt)"""
    x0 = np.array([[0.9]])
    x1 = np.array([[0.95]])
    p = crossing_probability(Interval(a=-1, b=1), x0, x1, 0.01)
    assert p[0] == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_crossing_probability_sphere_deep_inside():
    disk = Ball(center=[0.0, 0.0], radius=1.0)
    p = crossing_probability(disk, np.array([[0.0, 0.0]]), np.array([[0.01, 0.0]]), 1e-4)
    assert p[0] == pytest.approx(0.0, abs=1e-12)


def test_default_dt_scales_with_inradius():
    assert default_dt(Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)) == pytest.approx(1e-4)


def test_disk_mean_exit_time(stream):
    """Mean exit time of the unit disk from its centre is R^2 / n = 1/2"""
    disk = Ball(center=[0.0, 0.0], radius=1.0)
    batch = sample_exit_domain(disk, [0.0, 0.0], 1e-3, 4_000, stream)
    assert batch.scheme == SamplingScheme.EULER_BRIDGE
    assert batch.dt == 1e-3
    assert _within(batch.times, 0.5)


@pytest.mark.parametrize("coarse, fine", [(2e-3, 1e-3), (1e-3, 5e-4)])
def test_euler_disk_stable_under_step_halving(stream, coarse, fine):
    """Halving the step leaves the disk mean within sampling error"""
    disk = Ball(center=[0.0, 0.0], radius=1.0)
    first = sample_exit_domain(disk, [0.0, 0.0], coarse, 4_000, stream.substream(1)).times
    second = sample_exit_domain(disk, [0.0, 0.0], fine, 4_000, stream.substream(2)).times
    combined = math.sqrt(first.var(ddof=1) / first.size + second.var(ddof=1) / second.size)
    assert abs(first.mean() - second.mean()) <= 4 * combined
    assert _within(first, 0.5)
    assert _within(second, 0.5)


def test_euler_square_matches_product_law(stream):
    """Euler mean on the square agrees with the integral of the product survival"""
    expected, _ = quad(lambda t: float(survival_array(1.0, 1.0, t)) ** 2, 0.0, np.inf)
    batch = sample_exit_domain(UNIT_SQUARE, [0.0, 0.0], 1e-3, 4_000, stream)
    assert _within(batch.times, expected)


def test_euler_slab_matches_interval(stream):
    """Slab exit time is the interval exit time of the last coordinate"""
    slab = Slab(half_width=1.0)
    euler = sample_exit_domain(slab, [5.0, 0.0], 1e-3, 2_000, stream.substream(0)).times
    exact = sample_exit_interval(-1.0, 1.0, 0.0, 2_000, stream.substream(1)).times
    assert stats.ks_2samp(euler, exact).pvalue > 1e-3


def test_euler_step_guard(stream):
    """Paths outliving max_steps raise AccuracyError"""
    with pytest.raises(AccuracyError):
        sample_exit_domain(UNIT_SQUARE, [0.0, 0.0], 1e-4, 50, stream, max_steps=10)


def test_analytic_capability():
    """Intervals, slabs, rectangles and 1-D balls have an analytic law"""
    assert has_analytic_law(Slab(half_width=1.0, dimension=3))
    assert has_analytic_law(Ball(center=[0.5], radius=1.0))
    assert not has_analytic_law(Ball(center=[0.0, 0.0], radius=1.0))
    assert analytic_factors(Ball(center=[0.5], radius=1.0), [0.0]) == [(0.5, 1.5)]


def test_bm_survival_interval():
    estimate = bm_survival(Interval(a=-1, b=1), [0.0], 1.0)
    assert estimate.value == pytest.approx(0.37077, abs=1e-4)
    assert estimate.method == EstimateMethod.ANALYTIC


def test_bm_survival_rectangle_is_product():
    """Square survival is the square of the interval survival"""
    estimate = bm_survival(UNIT_SQUARE, [0.0, 0.0], 1.0)
    assert estimate.value == pytest.approx(0.13747, abs=1e-4)
    assert estimate.value == pytest.approx(float(survival_array(1.0, 1.0, 1.0)) ** 2, abs=1e-12)


def test_bm_survival_at_time_zero():
    assert bm_survival(Slab(half_width=2.0), [0.0, 1.9], 0.0).value == 1.0


def test_bm_survival_disk_needs_sampling(stream):
    """Analytic survival on a disk is a capability error"""
    disk = Ball(center=[0.0, 0.0], radius=1.0)
    with pytest.raises(CapabilityError):
        bm_survival(disk, [0.0, 0.0], 0.5)
    estimate = bm_survival(disk, [0.0, 0.0], 0.5, method=SurvivalMethod.MONTE_CARLO, count=2_000, dt=1e-3, stream=stream)
    assert 0.0 < estimate.value < 1.0
    assert estimate.n_samples == 2_000


def test_bm_survival_monte_carlo_agrees(stream):
    """Monte Carlo survival is within 4 standard errors of the series"""
    exact = float(survival_array(0.5, 1.5, 0.5))
    estimate = bm_survival(
        Interval(a=-1, b=1), [-0.5], 0.5, method="monte-carlo", count=10_000, stream=stream
    )
    assert abs(estimate.value - exact) < 4 * estimate.std_error


def test_bm_survival_monte_carlo_needs_stream():
    with pytest.raises(DomainError):
        bm_survival(Interval(a=-1, b=1), [0.0], 1.0, method=SurvivalMethod.MONTE_CARLO)


def test_bm_survival_rejects_boundary_start():
    with pytest.raises(PreconditionError):
        bm_survival(Interval(a=-1, b=1), [1.0], 1.0)


def test_exit_density_product_rule():
    """Density is minus the time derivative of the rectangle survival"""
    rect = Rectangle(xmin=-1, xmax=1, ymin=-2, ymax=2)
    z, t, h = [0.3, -0.5], 0.8, 1e-5
    difference = (analytic_survival(rect, z, t - h) - analytic_survival(rect, z, t + h)) / (2 * h)
    assert exit_density(rect, z, t) == pytest.approx(float(difference), abs=1e-7)


def test_rectangle_sampled_as_minimum(stream):
    """Rectangle draws come from exact inversion, not Euler"""
    batch = sample_exit_times(UNIT_SQUARE, [0.0, 0.0], 4_000, stream)
    assert batch.scheme == SamplingScheme.EXACT_INVERSION
    estimate = survival_from_batch(batch, 1.0)
    assert abs(estimate.value - 0.13747) < 4 * estimate.std_error


def test_empirical_exit_law(stream):
    """Empirical survival starts at 1 and the histogram integrates to 1"""
    batch = sample_exit_interval(-1.0, 1.0, 0.0, 5_000, stream)
    law = empirical_exit_law(batch, [0.0, 0.5, 1.0, 2.0])
    assert law.survival[0] == 1.0
    assert np.all(np.diff(law.survival) <= 0)
    assert np.sum(law.density * np.diff(law.bin_edges)) == pytest.approx(1.0, abs=1e-12)

    exact = float(survival_array(1.0, 1.0, 1.0))
    se = math.sqrt(exact * (1 - exact) / batch.count)
    assert abs(law.survival[2] - exact) < 4 * se


def test_empirical_exit_law_rejects_empty(stream):
    empty = ExitTimeSampleBatch(
        times=np.array([]),
        domain=Interval(a=-1, b=1),
        start=StartPoint(z=[0.0]),
        scheme=SamplingScheme.EXACT_INVERSION,
        stream=stream,
    )
    with pytest.raises(DomainError):
        empirical_exit_law(empty, [0.0, 1.0])


def test_batch_rejects_nonpositive_times(stream):
    with pytest.raises(DomainError):
        ExitTimeSampleBatch(
            times=np.array([0.5, 0.0]),
            domain=Interval(a=-1, b=1),
            start=StartPoint(z=[0.0]),
            scheme=SamplingScheme.EXACT_INVERSION,
            stream=stream,
        )


def test_batch_to_csv(tmp_path, stream):
    """Exported batches carry provenance comments and one time per row"""
    batch = sample_exit_interval(-1.0, 1.0, 0.0, 25, stream)
    path = batch.to_csv(tmp_path / "times.csv")
    lines = path.read_text().splitlines()
    comments = [line for line in lines if line.startswith("#")]
    assert any('"shape": "interval"' in line for line in comments)
    assert any("seed=20240611" in line for line in comments)
    data = lines[len(comments):]
    assert data[0] == "exit_time"
    assert [float(x) for x in data[1:]] == batch.times.tolist()
