"""
Numeric result records shared by all estimators.

EstimateWithError is the universal return value of Monte Carlo and
quadrature routines.
"""

from enum import Enum
from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.exceptions import DomainError


class EstimateMethod(str, Enum):
    """How an estimate was produced."""

    ANALYTIC = "analytic"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte-carlo"
    CONDITIONAL = "conditional"
    PATHWISE = "pathwise"

    @property
    def is_deterministic(self) -> bool:
        return self in (EstimateMethod.ANALYTIC, EstimateMethod.QUADRATURE)


class EstimateWithError(BaseModel):
    """
    A value with its standard error and sample count.

    For Monte Carlo methods std_error is the sample standard deviation
    divided by sqrt(n_samples). Deterministic methods report their
    truncation or refinement error instead.
    """

    value: float = Field(description="Point estimate")
    std_error: float = Field(ge=0.0, description="Standard error or error bound")
    n_samples: int = Field(ge=0, description="Number of samples (0 for deterministic methods)")
    method: EstimateMethod = Field(description="Estimator that produced the value")

    model_config = ConfigDict(frozen=True, use_enum_values=False)

    @model_validator(mode="after")
    def check_sample_count(self) -> "EstimateWithError":
        if not self.method.is_deterministic and self.n_samples < 1:
            raise ValueError("Monte Carlo estimates need at least one sample")
        return self

    @classmethod
    def exact(cls, value: float, error: float = 0.0) -> "EstimateWithError":
        """Deterministic value with an optional error bound."""
        return cls(value=float(value), std_error=float(error), n_samples=0, method=EstimateMethod.ANALYTIC)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return self.model_dump(mode="json")


def estimate_from_samples(values: np.ndarray, method: EstimateMethod) -> EstimateWithError:
    """
    Build an estimate from per-sample values.

    The mean uses numpy's pairwise summation over the array in the order
    given, so a chunk-ordered array yields the same bits whatever the
    number of workers that filled it.

    Args:
        values: Per-sample contributions, in chunk order
        method: Label for the estimator

    Returns:
        EstimateWithError with std_error = std(ddof=1)/sqrt(n)
    """
    samples = np.asarray(values, dtype=float).ravel()
    n = samples.size
    if n == 0:
        raise DomainError("Cannot build an estimate from zero samples")

    mean = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / np.sqrt(n)) if n > 1 else 0.0

    return EstimateWithError(value=mean, std_error=std_error, n_samples=n, method=method)
