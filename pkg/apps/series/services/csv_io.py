# Core
import csv
from pathlib import Path

# Libs
import numpy as np
from numpy.typing import ArrayLike

# Apps
from apps.series.entities import TimeSeries, as_series

# Global
from common.exceptions import InvalidConfig, NonFiniteSeries, SeriesTooShort
from common.functions import format_float, is_number


def read_series(path: str | Path) -> TimeSeries:
    """
    Read a series from a CSV file.

    One value per row is expected; extra columns are ignored. A single
    header row is accepted and detected by a non-numeric first token.
    """
    try:
        with open(path, newline="") as file:
            rows = [row for row in csv.reader(file) if row and row[0].strip()]
    except OSError as exc:
        raise InvalidConfig(
            f"Cannot read series from '{path}': {exc.strerror}."
        ) from exc

    if rows and not is_number(rows[0][0]):
        rows = rows[1:]

    values = []
    for line, row in enumerate(rows, start=1):
        token = row[0].strip()
        if not is_number(token):
            raise NonFiniteSeries(f"Row {line} holds a non-numeric value '{token}'.")
        values.append(float(token))

    if not values:
        raise SeriesTooShort(f"No samples found in '{path}'.")
    return TimeSeries(np.array(values))


def write_series(
    path: str | Path,
    series: TimeSeries | ArrayLike,
    *,
    header: str | None = None,
) -> None:
    """Write a series as one value per row, with an optional header."""
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        if header is not None:
            writer.writerow([header])
        for value in as_series(series).values:
            writer.writerow([format_float(value)])
