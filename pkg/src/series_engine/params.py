"""
Query and accuracy records for the interval exit law.
"""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.exceptions import DomainError

DEFAULT_ABS_TOL = 1e-12
DEFAULT_MAX_TERMS = 1000
# t / (u + v)^2 at or above this uses the eigenfunction form, below it the image form
DEFAULT_REGIME_RATIO = 0.16


class Side(str, Enum):
    """Endpoint that a first partial derivative moves."""

    U_SIDE = "u-side"
    V_SIDE = "v-side"


class SeriesParams(BaseModel):
    """Truncation and regime-switch controls shared by every series."""

    max_terms: int = Field(default=DEFAULT_MAX_TERMS, ge=1, description="Largest number of terms summed")
    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0, description="Target bound on the series tail")
    regime_ratio: float = Field(
        default=DEFAULT_REGIME_RATIO,
        gt=0,
        description="Threshold on t/(u+v)^2 between image and eigenfunction forms",
    )

    model_config = ConfigDict(frozen=True)


class IntervalExitQuery(BaseModel):
    """
    Exit of a Brownian motion started at 0 from (-u, v), observed at time t.
    """

    u: float = Field(description="Distance to the left endpoint")
    v: float = Field(description="Distance to the right endpoint")
    t: float = Field(description="Time")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_ranges(self) -> "IntervalExitQuery":
        for name in ("u", "v", "t"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite", {name: getattr(self, name)})
        if self.u <= 0 or self.v <= 0:
            raise DomainError("u and v must be positive", {"u": self.u, "v": self.v})
        if self.t < 0:
            raise DomainError("t must be nonnegative", {"t": self.t})
        return self
