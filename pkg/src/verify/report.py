"""
Verification records, the flag rule and report export.

A cell compares lhs <= rhs. With margin = rhs - lhs and combined standard
error se = sqrt(se_lhs^2 + se_rhs^2), the cell is flagged when

    margin < -(k * se + abs_tol).

A flag from sampling estimators is confirmed only if a rerun with four
times the samples on fresh streams flags again; otherwise it is reported
as unconfirmed. Flags between two deterministic values need no rerun.
"""

import logging
import math
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from common.csv_export import render_csv, write_csv
from common.estimates import EstimateWithError

logger = logging.getLogger(__name__)

DEFAULT_K = 3.0
CONFIRMATION_FACTOR = 4
FLAG_ABS_TOL = 1e-12

Rerun = Callable[[], Tuple[EstimateWithError, EstimateWithError]]


class CheckStatus(str, Enum):
    PASS = "pass"
    FLAG_UNCONFIRMED = "flag-unconfirmed"
    FLAG_CONFIRMED = "flag-confirmed"


class VerificationRecord(BaseModel):
    """One (z, t) or (z, p) cell of an inequality check."""

    cell: int
    label: str = Field(description="Human-readable cell coordinates")
    z: Optional[List[float]] = None
    t: Optional[float] = None
    p: Optional[float] = None
    lhs: EstimateWithError
    rhs: EstimateWithError
    margin: float
    combined_se: float
    status: CheckStatus

    model_config = ConfigDict(frozen=True)


def judge(lhs: EstimateWithError, rhs: EstimateWithError, k: float, abs_tol: float) -> Tuple[float, float, bool]:
    """Margin, combined standard error and flag for lhs <= rhs."""
    margin = rhs.value - lhs.value
    combined = math.hypot(lhs.std_error, rhs.std_error)
    return margin, combined, margin < -(k * combined + abs_tol)


def build_record(
    cell: int,
    label: str,
    lhs: EstimateWithError,
    rhs: EstimateWithError,
    k: float = DEFAULT_K,
    abs_tol: float = FLAG_ABS_TOL,
    rerun: Optional[Rerun] = None,
    **coordinates,
) -> VerificationRecord:
    """
    Judge one cell and, if it flags, try to confirm it.

    Args:
        cell: Cell index within the report
        label: Cell description
        lhs: Estimate expected to be smaller
        rhs: Estimate expected to be larger
        k: Standard errors of slack
        abs_tol: Absolute slack on top of k standard errors
        rerun: Produces fresh (lhs, rhs) at four times the samples
        coordinates: z, t or p of the cell
    """
    margin, combined, flagged = judge(lhs, rhs, k, abs_tol)
    status = CheckStatus.PASS

    if flagged:
        deterministic = lhs.method.is_deterministic and rhs.method.is_deterministic
        if deterministic:
            status = CheckStatus.FLAG_CONFIRMED
        elif rerun is None:
            status = CheckStatus.FLAG_UNCONFIRMED
        else:
            logger.warning("Cell %s flagged (margin %.3g, se %.3g); rerunning", label, margin, combined)
            again = judge(*rerun(), k, abs_tol)[2]
            status = CheckStatus.FLAG_CONFIRMED if again else CheckStatus.FLAG_UNCONFIRMED

        logger.warning("Cell %s: %s", label, status.value)
    else:
        logger.debug("Cell %s passes with margin %.3g", label, margin)

    return VerificationRecord(
        cell=cell,
        label=label,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        combined_se=combined,
        status=status,
        **coordinates,
    )


def format_point(z: Sequence[float]) -> str:
    return "(" + ", ".join(f"{c:g}" for c in z) + ")"


CSV_COLUMNS = [
    "cell", "label", "z", "t", "p",
    "lhs", "lhs_se", "lhs_n", "lhs_method",
    "rhs", "rhs_se", "rhs_n", "rhs_method",
    "margin", "combined_se", "status",
]


class VerificationReport(BaseModel):
    """Records of one check with the flag-rule constant used."""

    name: str
    k: float = DEFAULT_K
    records: List[VerificationRecord] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in CheckStatus}
        for record in self.records:
            counts[record.status.value] += 1
        return counts

    @property
    def worst(self) -> Optional[VerificationRecord]:
        """Record with the smallest margin."""
        return min(self.records, key=lambda r: r.margin, default=None)

    @property
    def has_confirmed_flag(self) -> bool:
        return any(r.status == CheckStatus.FLAG_CONFIRMED for r in self.records)

    def summary_text(self) -> str:
        counts = self.counts
        lines = [
            f"{self.name}: {len(self.records)} cells, k={self.k:g}",
            "  " + ", ".join(f"{status}={count}" for status, count in counts.items()),
        ]
        worst = self.worst
        if worst is not None:
            lines.append(f"  worst margin {worst.margin:.6g} (se {worst.combined_se:.3g}) at {worst.label}")
        return "\n".join(lines)

    def csv_rows(self) -> List[list]:
        return [
            [
                r.cell, r.label, r.z, r.t, r.p,
                r.lhs.value, r.lhs.std_error, r.lhs.n_samples, r.lhs.method,
                r.rhs.value, r.rhs.std_error, r.rhs.n_samples, r.rhs.method,
                r.margin, r.combined_se, r.status,
            ]
            for r in self.records
        ]

    def to_csv_text(self, header_lines: Sequence[str] = ()) -> str:
        return render_csv(CSV_COLUMNS, self.csv_rows(), list(header_lines))

    def to_csv(self, path: Path, header_lines: Sequence[str] = ()) -> Path:
        return write_csv(path, CSV_COLUMNS, self.csv_rows(), list(header_lines))
