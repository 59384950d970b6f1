"""
CSV writer with reproducibility header comments.

Floats are written in their shortest round-trip form with '.' as the
decimal separator, so identical inputs give byte-identical files on
every platform.
"""

import csv
import io
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)


def format_cell(value: Any) -> str:
    """Locale-independent text for one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return " ".join(format_cell(v) for v in value)
    return str(value)


def render_csv(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header_lines: Optional[Sequence[str]] = None,
) -> str:
    """
    Render rows to CSV text.

    Args:
        columns: Column names for the header row
        rows: Data rows
        header_lines: Comment lines written first, each prefixed with '# '

    Returns:
        The CSV document as a string with '\\n' line endings
    """
    buffer = io.StringIO()
    for line in header_lines or []:
        buffer.write(f"# {line}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])

    return buffer.getvalue()


def write_csv(
    path: Union[str, Path],
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    header_lines: Optional[Sequence[str]] = None,
) -> Path:
    """Write rows to a CSV file; see render_csv."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = render_csv(columns, rows, header_lines)
    path.write_text(text, encoding="utf-8", newline="")
    logger.info("Wrote %s", path)
    return path
