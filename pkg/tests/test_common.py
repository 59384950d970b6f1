"""
Tests for validators, estimates, random streams and CSV export.
"""

import math

import numpy as np
import pytest

from common.csv_export import format_cell, render_csv, write_csv
from common.estimates import EstimateMethod, EstimateWithError, estimate_from_samples
from common.exceptions import DomainError
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import (
    validate_count,
    validate_finite,
    validate_grid,
    validate_nonnegative,
    validate_point,
    validate_positive,
)


def test_validate_finite_rejects_nan_and_text():
    """Non-finite or non-numeric input raises DomainError"""
    assert validate_finite("2.5") == 2.5
    with pytest.raises(DomainError):
        validate_finite(float("nan"))
    with pytest.raises(DomainError):
        validate_finite("abc", "t")


def test_validate_positive_and_nonnegative():
    """Zero is nonnegative but not positive"""
    assert validate_nonnegative(0.0) == 0.0
    with pytest.raises(DomainError) as exc_info:
        validate_positive(0.0, "u")
    assert exc_info.value.details == {"u": 0.0}


@pytest.mark.parametrize("bad", [0, -3, 2.5, True, "ten", None])
def test_validate_count_rejects(bad):
    """Counts must be integers of at least one"""
    with pytest.raises(DomainError):
        validate_count(bad)


def test_validate_count_accepts_integral_float():
    assert validate_count(10.0) == 10


def test_validate_grid_order_constraints():
    """Grids are checked for emptiness, sign and order"""
    assert validate_grid([0.0, 1.0, 2.0], strictly_increasing=True, nonnegative=True).tolist() == [0.0, 1.0, 2.0]
    with pytest.raises(DomainError):
        validate_grid([])
    with pytest.raises(DomainError):
        validate_grid([1.0, 1.0], strictly_increasing=True)
    with pytest.raises(DomainError):
        validate_grid([-1.0, 1.0], nonnegative=True)


def test_validate_point_dimension():
    """Scalars pass in one dimension, mismatched points fail"""
    assert validate_point(0.5, 1).tolist() == [0.5]
    with pytest.raises(DomainError):
        validate_point([0.0, 0.0], 3)


def test_estimate_from_samples():
    """Mean and standard error follow the sample formulas"""
    samples = np.array([1.0, 2.0, 3.0, 4.0])
    estimate = estimate_from_samples(samples, EstimateMethod.MONTE_CARLO)
    assert estimate.value == 2.5
    assert estimate.std_error == pytest.approx(np.std(samples, ddof=1) / 2.0)
    assert estimate.n_samples == 4


def test_estimate_requires_samples_for_monte_carlo():
    """Monte Carlo estimates without samples are rejected"""
    with pytest.raises(ValueError):
        EstimateWithError(value=0.5, std_error=0.1, n_samples=0, method=EstimateMethod.MONTE_CARLO)
    exact = EstimateWithError.exact(1.0, 1e-12)
    assert exact.method.is_deterministic
    assert exact.to_dict()["method"] == "analytic"


def test_fill_chunks_independent_of_workers(stream):
    """Chunked fills give identical bits for any worker count"""
    small = stream.model_copy(update={"chunk_size": 100})

    def fill(generator, n):
        return generator.standard_normal(n)

    serial = fill_chunks(small, 1050, fill, workers=1)
    threaded = fill_chunks(small, 1050, fill, workers=4)
    assert serial.shape == (1050,)
    assert np.array_equal(serial, threaded)


def test_substreams_differ(stream):
    """Substreams draw different numbers from the parent"""
    parent = stream.generator(0).random(5)
    child = stream.substream(0).generator(0).random(5)
    assert not np.array_equal(parent, child)
    assert stream.substream(3) == stream.substream(3)


def test_chunk_bounds_cover_range():
    stream = RandomStream(master_seed=1, chunk_size=4)
    assert stream.chunk_bounds(10) == [(0, 4), (4, 8), (8, 10)]


def test_default_workers_from_env(monkeypatch):
    """ISOPERIM_WORKERS sets the default, garbage falls back to one"""
    monkeypatch.setenv("ISOPERIM_WORKERS", "6")
    assert default_workers() == 6
    monkeypatch.setenv("ISOPERIM_WORKERS", "many")
    assert default_workers() == 1


def test_format_cell_round_trips_floats():
    """Floats use repr so they parse back to the same value"""
    value = 0.1 + 0.2
    assert float(format_cell(value)) == value
    assert format_cell(np.float64(math.inf)) == "inf"
    assert format_cell(True) == "true"
    assert format_cell([0.5, -1.0]) == "0.5 -1.0"
    assert format_cell(EstimateMethod.QUADRATURE) == "quadrature"


def test_render_csv_header_comments():
    """Header lines are written as comments before the column row"""
    text = render_csv(["a", "b"], [[1, 0.5]], header_lines=["seed=7"])
    assert text == "# seed=7\na,b\n1,0.5\n"


def test_write_csv_creates_parent(tmp_path):
    """write_csv creates missing directories"""
    path = write_csv(tmp_path / "nested" / "out.csv", ["x"], [[1.0]])
    assert path.read_text() == "x\n1.0\n"
