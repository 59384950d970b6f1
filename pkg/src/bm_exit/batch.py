"""
Container for sampled exit times.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from common.csv_export import write_csv
from common.exceptions import DomainError
from common.streams import RandomStream
from domains.shapes import BaseDomain, StartPoint


class SamplingScheme(str, Enum):
    """How exit times were drawn."""

    EXACT_INVERSION = "exact-inversion"
    EULER_BRIDGE = "euler-bridge"


class ExitTimeSampleBatch(BaseModel):
    """
    Independent draws of tau_D started at a fixed point.

    Times are in chunk order, so the batch is reproducible from the
    stream alone.
    """

    times: np.ndarray = Field(description="Exit times, all positive and finite")
    domain: Any = Field(description="Domain the paths exit from")
    start: StartPoint
    scheme: SamplingScheme
    dt: Optional[float] = Field(default=None, description="Euler step, None for exact schemes")
    stream: RandomStream

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("times")
    @classmethod
    def check_times(cls, times: Any) -> np.ndarray:
        times = np.asarray(times, dtype=float).ravel()
        if not np.all(np.isfinite(times)) or np.any(times <= 0):
            raise DomainError("exit times must be positive and finite")
        return times

    @field_validator("domain")
    @classmethod
    def check_domain(cls, domain: Any) -> BaseDomain:
        if not isinstance(domain, BaseDomain):
            raise DomainError("batch domain must be a Domain", {"type": type(domain).__name__})
        return domain

    @property
    def count(self) -> int:
        return int(self.times.size)

    def header_lines(self) -> List[str]:
        """Provenance lines written above the exported column."""
        return [
            f"domain={json.dumps(self.domain.model_dump(mode='json', by_alias=True), sort_keys=True)}",
            f"start={json.dumps(self.start.z)}",
            f"scheme={self.scheme.value}",
            f"dt={self.dt!r}",
            f"seed={self.stream.master_seed} stream={self.stream.stream_index} "
            f"chunk_size={self.stream.chunk_size}",
        ]

    def to_csv(self, path: Path) -> Path:
        """Write the batch as a single `exit_time` column."""
        return write_csv(path, ["exit_time"], ([t] for t in self.times), self.header_lines())
