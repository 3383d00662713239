"""
Machine-readable output: fixed-precision numbers, key/value records and CSV files.
"""
import csv
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import click
import numpy as np

from app.core.exceptions import SceneFileError

SIGNIFICANT_DIGITS = 9


def format_number(value: float) -> str:
    """9 significant digits, positional notation, trailing zeros trimmed."""
    value = float(value)
    if value == 0.0:
        return "0"
    return np.format_float_positional(
        value, precision=SIGNIFICANT_DIGITS, unique=False, fractional=False, trim="-"
    )


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_number(value)
    if value is None:
        return ""
    return str(value)


def format_values(values: Iterable[Any]) -> str:
    return ",".join(format_value(v) for v in values)


def emit(*values: Any) -> None:
    """Print one comma-separated result line on standard output."""
    click.echo(format_values(values))


def emit_record(key: str, *values: Any) -> None:
    """Print a `key,value[,value...]` line."""
    click.echo(",".join([key] + [format_value(v) for v in values]))


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Optional[Sequence[str]] = None,
) -> int:
    """Write rows with a one-line header; returns the row count."""
    count = 0
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            for comment in comments or []:
                f.write(f"# {comment}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
                count += 1
    except OSError as e:
        raise SceneFileError(f"cannot write {path}: {e.strerror or e}")
    return count
