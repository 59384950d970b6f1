"""
Empirical exit law of a sample batch.
"""

from typing import NamedTuple, Optional, Union

import numpy as np

from common.exceptions import DomainError
from common.validators import validate_grid
from bm_exit.batch import ExitTimeSampleBatch


class EmpiricalExitLaw(NamedTuple):
    grid: np.ndarray
    survival: np.ndarray
    bin_edges: np.ndarray
    density: np.ndarray


def empirical_survival(times: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Right-continuous fraction of times strictly greater than each grid point."""
    ordered = np.sort(times)
    return 1.0 - np.searchsorted(ordered, grid, side="right") / ordered.size


def empirical_exit_law(
    batch: ExitTimeSampleBatch,
    grid,
    bins: Optional[Union[int, str]] = None,
) -> EmpiricalExitLaw:
    """
    Empirical survival function and histogram density of a batch.

    Args:
        batch: Exit-time draws
        grid: Strictly increasing times at which to evaluate survival
        bins: Histogram bins; Freedman-Diaconis when omitted

    Returns:
        EmpiricalExitLaw with the density normalized to integrate to 1

    Raises:
        DomainError: If the batch is empty or the grid is not increasing
    """
    if batch.count == 0:
        raise DomainError("empirical exit law needs a nonempty batch")
    grid = validate_grid(grid, "grid", strictly_increasing=True)

    survival = empirical_survival(batch.times, grid)
    density, edges = np.histogram(batch.times, bins="fd" if bins is None else bins, density=True)
    return EmpiricalExitLaw(grid, survival, edges, density)
