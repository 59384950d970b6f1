"""
Queries and estimator settings for iterated processes.
"""

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.exceptions import DomainError, ValidationException
from domains.shapes import Domain, StartPoint

# Both tails of the outer exit-time law beyond this mass are dropped by quadrature
QUADRATURE_TAIL = 1e-10


class ProcessKind(str, Enum):
    """
    Iterated process whose exit time is studied.

    IBM runs two independent outer Brownian motions on the two sides of
    the inner path, BTBM runs one.
    """

    IBM = "ibm"
    BTBM = "btbm"

    @property
    def outer_count(self) -> int:
        return 2 if self == ProcessKind.IBM else 1


class SurvivalEstimator(str, Enum):
    CONDITIONAL = "conditional"
    QUADRATURE = "quadrature"
    PATHWISE = "pathwise"


class EstimatorSettings(BaseModel):
    """Sampling and quadrature controls shared by every iterated estimator."""

    method: SurvivalEstimator = Field(default=SurvivalEstimator.CONDITIONAL)
    count: int = Field(default=100_000, ge=1, description="Monte Carlo sample count")
    dt: Optional[float] = Field(default=None, gt=0, description="Euler step for outer exit times")
    dt_y: float = Field(default=1e-3, gt=0, description="Inner path step for the pathwise method")
    quadrature_order: int = Field(default=32, ge=2, description="Gauss-Legendre nodes per panel")
    workers: Optional[int] = Field(default=None, ge=1)

    model_config = ConfigDict(frozen=True)


class IteratedQuery(BaseModel):
    """Exit of an iterated process from `domain`, at time t or of moment order p."""

    domain: Domain
    start: StartPoint
    process: ProcessKind
    t: Optional[float] = None
    p: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_query(self) -> "IteratedQuery":
        if self.t is None and self.p is None:
            raise ValidationException("iterated query needs a time t or a moment order p")
        if self.t is not None and not (math.isfinite(self.t) and self.t >= 0):
            raise DomainError("t must be a finite nonnegative time", {"t": self.t})
        if self.p is not None and not (math.isfinite(self.p) and self.p >= 1):
            raise DomainError("moment order p must be >= 1", {"p": self.p})
        self.start.validate_in(self.domain)
        return self

    @property
    def z(self) -> np.ndarray:
        return self.start.point
