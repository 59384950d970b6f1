"""
Input validation utilities for numeric arguments.

Validates scalars, grids and points before they reach the series,
samplers and estimators, so failures surface as DomainError with the
offending field named.
"""

import logging
import math
from typing import Any, Sequence

import numpy as np

from common.exceptions import DomainError

logger = logging.getLogger(__name__)

# Upper bound on a single sample request; larger fills must be chunked by the caller
MAX_SAMPLE_COUNT = 1_000_000_000


def validate_finite(value: Any, field_name: str = "value") -> float:
    """
    Validate that a value is a finite real number.

    Args:
        value: The value to validate
        field_name: Name of the field for error messages

    Returns:
        The value as float

    Raises:
        DomainError: If value is not a finite real
    """
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{field_name} must be a real number", {field_name: value}) from exc

    if not math.isfinite(number):
        raise DomainError(f"{field_name} must be finite", {field_name: value})

    return number


def validate_positive(value: Any, field_name: str = "value") -> float:
    """Validate a finite, strictly positive real."""
    number = validate_finite(value, field_name)
    if number <= 0:
        raise DomainError(f"{field_name} must be positive", {field_name: number})
    return number


def validate_nonnegative(value: Any, field_name: str = "value") -> float:
    """Validate a finite, nonnegative real."""
    number = validate_finite(value, field_name)
    if number < 0:
        raise DomainError(f"{field_name} must be nonnegative", {field_name: number})
    return number


def validate_count(count: Any, field_name: str = "count") -> int:
    """
    Validate a sample count.

    Returns:
        The count as int

    Raises:
        DomainError: If count is not an integer in [1, MAX_SAMPLE_COUNT]
    """
    try:
        is_integer = not isinstance(count, bool) and int(count) == count
    except (TypeError, ValueError):
        is_integer = False
    if not is_integer:
        raise DomainError(f"{field_name} must be an integer", {field_name: count})

    count = int(count)
    if count < 1:
        raise DomainError(f"{field_name} must be at least 1", {field_name: count})
    if count > MAX_SAMPLE_COUNT:
        raise DomainError(
            f"{field_name} exceeds maximum of {MAX_SAMPLE_COUNT}", {field_name: count}
        )
    return count


def validate_grid(
    values: Sequence[float],
    field_name: str = "grid",
    strictly_increasing: bool = False,
    nonnegative: bool = False,
) -> np.ndarray:
    """
    Validate a one-dimensional grid of reals.

    Args:
        values: Grid points
        field_name: Name of the field for error messages
        strictly_increasing: Require strictly increasing order
        nonnegative: Require all points to be >= 0

    Returns:
        The grid as a float array

    Raises:
        DomainError: If the grid is empty, nonfinite or violates the order constraints
    """
    grid = np.asarray(values, dtype=float).ravel()

    if grid.size == 0:
        raise DomainError(f"{field_name} must not be empty")
    if not np.all(np.isfinite(grid)):
        raise DomainError(f"{field_name} must contain only finite values")
    if nonnegative and np.any(grid < 0):
        raise DomainError(f"{field_name} must be nonnegative")
    if strictly_increasing and np.any(np.diff(grid) <= 0):
        raise DomainError(f"{field_name} must be strictly increasing")

    return grid


def validate_point(x: Any, dimension: int, field_name: str = "point") -> np.ndarray:
    """
    Validate a point in R^dimension.

    Scalars are accepted for dimension 1.

    Raises:
        DomainError: If the dimension does not match or a coordinate is nonfinite
    """
    point = np.atleast_1d(np.asarray(x, dtype=float))

    if point.ndim != 1 or point.shape[0] != dimension:
        raise DomainError(
            f"{field_name} has dimension {point.shape[-1] if point.ndim else 0}, expected {dimension}",
            {field_name: point.tolist()},
        )
    if not np.all(np.isfinite(point)):
        raise DomainError(f"{field_name} must have finite coordinates")

    return point
