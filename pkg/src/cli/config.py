"""
Experiment configuration.

An experiment is one JSON document, for example

    {
      "command": "verify",
      "check": "isoperimetric",
      "domain": {"shape": "rectangle", "xmin": -1, "xmax": 1, "ymin": -2, "ymax": 2},
      "comparison": "equal-volume-ball",
      "process": "ibm",
      "z_grid": [[0, 0], [0.5, 1]],
      "t_grid": [0.25, 1, 4],
      "estimator": {"method": "conditional", "count": 20000},
      "master_seed": 7
    }
"""

import hashlib
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from common.exceptions import ConfigurationError, IsoperimetryException
from common.streams import DEFAULT_CHUNK_SIZE, RandomStream
from domains import ComparisonKind, Domain
from iterated import EstimatorSettings, ProcessKind, SurvivalEstimator, TabulatedPhi
from series_engine import SeriesParams
from verify import DominanceSpec

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


class Command(str, Enum):
    SURVIVAL = "survival"
    MOMENTS = "moments"
    VERIFY = "verify"
    SIGN_SCAN = "sign-scan"
    CROSSCHECK = "crosscheck"


class CheckKind(str, Enum):
    """Which inequality a verify command runs."""

    ISOPERIMETRIC = "isoperimetric"
    MOMENTS = "moments"
    BROWNIAN = "brownian"
    DOMINANCE = "dominance"
    MONOTONICITY = "monotonicity"


# Grids each command (and verify check) reads
_REQUIRED_GRIDS = {
    Command.SURVIVAL: ("z_grid", "t_grid"),
    Command.MOMENTS: ("z_grid", "p_grid"),
    Command.SIGN_SCAN: ("u_grid", "v_grid", "t_grid"),
    Command.CROSSCHECK: ("z_grid", "t_grid"),
    CheckKind.ISOPERIMETRIC: ("z_grid", "t_grid"),
    CheckKind.MOMENTS: (),
    CheckKind.BROWNIAN: ("z_grid", "t_grid"),
    CheckKind.DOMINANCE: (),
    CheckKind.MONOTONICITY: ("u_grid", "t_grid"),
}


class ExperimentConfig(BaseModel):
    """Validated experiment description."""

    command: Command
    check: Optional[CheckKind] = Field(default=None, description="Inequality run by the verify command")
    domain: Optional[Domain] = None
    comparison: Optional[ComparisonKind] = None
    process: ProcessKind = ProcessKind.IBM
    dominance: Optional[DominanceSpec] = None

    z_grid: Optional[List[Union[float, List[float]]]] = None
    t_grid: Optional[List[float]] = None
    u_grid: Optional[List[float]] = None
    v_grid: Optional[List[float]] = None
    p_grid: Optional[List[float]] = None
    phi: Optional[TabulatedPhi] = Field(default=None, description="Nondecreasing phi table for the moments check")

    estimator: EstimatorSettings = Field(default_factory=EstimatorSettings)
    series: SeriesParams = Field(default_factory=SeriesParams)
    k: float = Field(default=3.0, gt=0, description="Standard errors of slack in the flag rule")
    confirm: bool = Field(default=True, description="Rerun flagged cells at four times the samples")

    master_seed: Optional[int] = Field(default=None, ge=0, le=MAX_SEED)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    out: Optional[str] = Field(default=None, description="Output CSV path")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_command(self) -> "ExperimentConfig":
        key: Any = self.command
        if self.command == Command.VERIFY:
            if self.check is None:
                raise ValueError("verify needs a check")
            key = self.check

        for name in _REQUIRED_GRIDS[key]:
            if not getattr(self, name):
                raise ValueError(f"{name} must be a nonempty list for {key.value}")

        if self.needs_domain and self.domain is None:
            raise ValueError(f"{key.value} needs a domain")
        if self.command == Command.VERIFY and self.check in (
            CheckKind.ISOPERIMETRIC, CheckKind.MOMENTS, CheckKind.BROWNIAN
        ) and self.comparison is None:
            raise ValueError(f"{self.check.value} check needs a comparison")
        if self.check == CheckKind.MOMENTS and not self.p_grid and self.phi is None:
            raise ValueError("moments check needs a nonempty p_grid or a phi table")
        if self.phi is not None and self.check != CheckKind.MOMENTS:
            raise ValueError("phi is read by the moments check only")
        if self.check == CheckKind.DOMINANCE and self.dominance is None:
            raise ValueError("dominance check needs a dominance block")
        if self.is_stochastic and self.master_seed is None:
            raise ValueError("master_seed is required for stochastic commands")
        return self

    @property
    def needs_domain(self) -> bool:
        if self.command == Command.VERIFY:
            return self.check in (CheckKind.ISOPERIMETRIC, CheckKind.MOMENTS, CheckKind.BROWNIAN)
        return self.command in (Command.SURVIVAL, Command.MOMENTS, Command.CROSSCHECK)

    @property
    def is_stochastic(self) -> bool:
        if self.command in (Command.SIGN_SCAN, Command.CROSSCHECK):
            return False
        if self.command == Command.VERIFY and self.check == CheckKind.MONOTONICITY:
            return False
        if self.command == Command.SURVIVAL:
            return self.estimator.method != SurvivalEstimator.QUADRATURE
        return True

    def stream(self, index: int = 0) -> RandomStream:
        return RandomStream(master_seed=self.master_seed or 0, stream_index=index, chunk_size=self.chunk_size)

    def canonical(self) -> Dict[str, Any]:
        """JSON form that identifies the numerical content of the experiment."""
        data = self.model_dump(mode="json", by_alias=True, exclude={"out"})
        data["estimator"].pop("workers", None)
        return data

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return f"{location}: {first['msg']}"


def _locate(data: Dict[str, Any]) -> Optional[str]:
    """First top-level block that fails validation on its own."""
    for name, field in ExperimentConfig.model_fields.items():
        if name not in data:
            continue
        try:
            TypeAdapter(field.annotation).validate_python(data[name])
        except Exception:
            return name
    return None


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    """
    Validate a configuration mapping.

    Raises:
        ConfigurationError: With the failing field as location
    """
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(
            f"Invalid configuration: {_describe(exc)}",
            location=_describe(exc).split(":")[0],
            details={"errors": len(exc.errors())},
        ) from exc
    except IsoperimetryException as exc:
        raise ConfigurationError(f"Invalid configuration: {exc}", location=_locate(data), details=exc.details) from exc


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment configuration file.

    Raises:
        ConfigurationError: With line/column for JSON syntax errors and the
            field path for validation errors
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config {path}: {exc}", location=str(path)) from exc

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"Config {path} is not valid JSON: {exc.msg}",
            location=f"line {exc.lineno}, column {exc.colno}",
        ) from exc

    if not isinstance(data, dict):
        raise ConfigurationError(f"Config {path} must be a JSON object", location="line 1, column 1")

    config = parse_config(data)
    logger.debug("Loaded %s config from %s", config.command.value, path)
    return config


def with_seed(config: ExperimentConfig, seed: Optional[int]) -> ExperimentConfig:
    """The configuration with master_seed replaced, revalidated."""
    if seed is None:
        return config
    data = config.model_dump(mode="json", by_alias=True)
    data["master_seed"] = seed
    return parse_config(data)
