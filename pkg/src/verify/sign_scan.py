"""
Exploratory scan of the sign of d^2/(du dv) P_0[eta_(-u,v) > t].

The scan only reports what it sees on the grid; it is never a pass/fail
gate.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from common.csv_export import write_csv
from common.exceptions import DomainError
from common.validators import validate_grid
from series_engine import SeriesParams, mixed_partial_array

logger = logging.getLogger(__name__)

SIGN_COLUMNS = ["u", "v", "t", "mixed_partial"]


class SignScanResult(BaseModel):
    """Mixed partials on the product grid with sign counts and the minimum."""

    u_grid: List[float]
    v_grid: List[float]
    t_grid: List[float]
    values: np.ndarray
    minimum: float
    argmin: Tuple[float, float, float]

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def counts(self) -> Dict[str, int]:
        return {
            "positive": int(np.count_nonzero(self.values > 0)),
            "negative": int(np.count_nonzero(self.values < 0)),
            "zero": int(np.count_nonzero(self.values == 0)),
        }

    def summary_text(self) -> str:
        counts = self.counts
        u, v, t = self.argmin
        return (
            f"sign scan: {self.values.size} points, positive={counts['positive']}, "
            f"negative={counts['negative']}, zero={counts['zero']}\n"
            f"  minimum {self.minimum:.6g} at u={u:g} v={v:g} t={t:g}"
        )

    def rows(self) -> List[list]:
        rows = []
        for i, u in enumerate(self.u_grid):
            for j, v in enumerate(self.v_grid):
                for k, t in enumerate(self.t_grid):
                    rows.append([u, v, t, float(self.values[i, j, k])])
        return rows

    def to_csv(self, path: Path, header_lines: Sequence[str] = ()) -> Path:
        return write_csv(path, SIGN_COLUMNS, self.rows(), list(header_lines))


def sign_scan(u_grid, v_grid, t_grid, params: SeriesParams = None) -> SignScanResult:
    """
    Evaluate the mixed partial on u_grid x v_grid x t_grid.

    Raises:
        DomainError: If a grid is empty or not strictly positive
    """
    grids = []
    for values, name in ((u_grid, "u_grid"), (v_grid, "v_grid"), (t_grid, "t_grid")):
        grid = validate_grid(values, name)
        if np.any(grid <= 0):
            raise DomainError(f"{name} must be positive")
        grids.append(grid)
    u, v, t = grids

    values = mixed_partial_array(u[:, None, None], v[None, :, None], t[None, None, :], params)
    index = np.unravel_index(int(np.argmin(values)), values.shape)
    result = SignScanResult(
        u_grid=u.tolist(),
        v_grid=v.tolist(),
        t_grid=t.tolist(),
        values=values,
        minimum=float(values[index]),
        argmin=(float(u[index[0]]), float(v[index[1]]), float(t[index[2]])),
    )
    logger.info(result.summary_text())
    return result
