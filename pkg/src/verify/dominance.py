"""
Transfer of stochastic dominance through the interval exit law.

If P[xi > t] <= P[T > t] for all t, then for independent copies

    P[eta_(-xi1, xi2) > t] <= P[eta_(-T1, T2) > t]   and
    P[eta_(-xi, xi) > t]   <= P[eta_(-T, T) > t].

Laws are configured as tagged records, e.g. {"kind": "exponential", "rate": 2}.
"""

import logging
from abc import ABC, abstractmethod
from functools import partial
from typing import Annotated, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from common.estimates import EstimateMethod, estimate_from_samples
from common.exceptions import PreconditionError, ValidationException
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import validate_count, validate_grid
from series_engine import SeriesParams, survival_array
from verify.report import CONFIRMATION_FACTOR, DEFAULT_K, FLAG_ABS_TOL, VerificationReport, build_record

logger = logging.getLogger(__name__)

DOMINANCE_TOL = 1e-12


class BaseLaw(BaseModel, ABC):
    """Law of a positive random variable."""

    model_config = ConfigDict(frozen=True)

    @abstractmethod
    def survival(self, t: np.ndarray) -> np.ndarray:
        """P[X > t]."""

    @abstractmethod
    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        """n independent draws."""


class PointMass(BaseLaw):
    kind: Literal["point-mass"] = "point-mass"
    value: float = Field(gt=0)

    def survival(self, t):
        return np.where(np.asarray(t, dtype=float) < self.value, 1.0, 0.0)

    def sample(self, gen, n):
        return np.full(n, self.value)


class Exponential(BaseLaw):
    kind: Literal["exponential"] = "exponential"
    rate: float = Field(gt=0)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < 0, 1.0, np.exp(-self.rate * np.maximum(t, 0.0)))

    def sample(self, gen, n):
        # inversion keeps draws strictly positive
        return -np.log1p(-gen.random(n)) / self.rate + np.finfo(float).tiny


class Empirical(BaseLaw):
    """Resampling from a fixed list of positive observations."""

    kind: Literal["empirical"] = "empirical"
    samples: List[float] = Field(min_length=1)

    @model_validator(mode="after")
    def check_samples(self) -> "Empirical":
        values = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValidationException("empirical law needs positive finite samples")
        return self

    def survival(self, t):
        ordered = np.sort(self.samples)
        return 1.0 - np.searchsorted(ordered, np.asarray(t, dtype=float), side="right") / ordered.size

    def sample(self, gen, n):
        return gen.choice(np.asarray(self.samples, dtype=float), size=n, replace=True)


Law = Annotated[Union[PointMass, Exponential, Empirical], Field(discriminator="kind")]


class DominanceSpec(BaseModel):
    """Laws of xi and T with the times at which dominance is checked and transferred."""

    xi_law: Law
    T_law: Law
    t_grid: List[float] = Field(min_length=1)

    model_config = ConfigDict(frozen=True)

    def check_precondition(self) -> None:
        """
        Raises:
            PreconditionError: Naming the first t with P[xi > t] > P[T > t]
        """
        grid = validate_grid(self.t_grid, "t_grid", nonnegative=True)
        excess = self.xi_law.survival(grid) - self.T_law.survival(grid)
        failing = np.flatnonzero(excess > DOMINANCE_TOL)
        if failing.size:
            t = float(grid[failing[0]])
            raise PreconditionError(f"P[xi > t] exceeds P[T > t] at t={t:g}", {"t": t})


def _draw_pairs(law: BaseLaw, count: int, stream: RandomStream, workers: int) -> np.ndarray:
    return fill_chunks(stream, count, lambda gen, n: np.column_stack([law.sample(gen, n), law.sample(gen, n)]), workers)


def _transfer_estimates(law: BaseLaw, t: float, count: int, stream: RandomStream, params, workers):
    pairs = _draw_pairs(law, count, stream, workers)
    two_sided = estimate_from_samples(survival_array(pairs[:, 0], pairs[:, 1], t, params), EstimateMethod.CONDITIONAL)
    symmetric = estimate_from_samples(survival_array(pairs[:, 0], pairs[:, 0], t, params), EstimateMethod.CONDITIONAL)
    return two_sided, symmetric


def _rerun(spec, t, form, count, stream, cell, params, workers):
    offset = 10_000 + 2 * cell
    lhs = _transfer_estimates(spec.xi_law, t, count * CONFIRMATION_FACTOR, stream.substream(offset), params, workers)
    rhs = _transfer_estimates(spec.T_law, t, count * CONFIRMATION_FACTOR, stream.substream(offset + 1), params, workers)
    return lhs[form], rhs[form]


def check_dominance(
    spec: DominanceSpec,
    count: int,
    stream: RandomStream,
    k: float = DEFAULT_K,
    params: SeriesParams = None,
    confirm: bool = True,
    workers: int = None,
) -> VerificationReport:
    """
    Check that dominance of xi by T carries over to the interval exit law.

    For every t two cells are produced, the two-sided form with independent
    pairs and the symmetric form with single draws. Each side averages the
    interval series over its own draws.

    Raises:
        PreconditionError: If P[xi > t] > P[T > t] at some grid time
    """
    spec.check_precondition()
    count = validate_count(count)
    workers = workers or default_workers()
    grid = validate_grid(spec.t_grid, "t_grid", nonnegative=True)

    records = []
    for j, t in enumerate(grid):
        lhs = _transfer_estimates(spec.xi_law, t, count, stream.substream(2 * j), params, workers)
        rhs = _transfer_estimates(spec.T_law, t, count, stream.substream(2 * j + 1), params, workers)
        for form, name in enumerate(("two-sided", "symmetric")):
            cell = len(records)
            rerun = partial(_rerun, spec, float(t), form, count, stream, cell, params, workers) if confirm else None
            records.append(
                build_record(cell, f"{name} t={t:g}", lhs[form], rhs[form], k, FLAG_ABS_TOL, rerun, t=float(t))
            )

    report = VerificationReport(
        name=f"dominance {spec.xi_law.kind} vs {spec.T_law.kind}", k=k, records=records
    )
    logger.info(report.summary_text())
    return report
