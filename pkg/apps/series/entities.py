# Core
from dataclasses import dataclass

# Libs
import numpy as np
from numpy.typing import ArrayLike, NDArray

# Global
from common.exceptions import NonFiniteSeries, ShapeMismatch


def _frozen(values: NDArray) -> NDArray:
    values.flags.writeable = False
    return values


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """An ordered sequence of finite real samples."""

    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ShapeMismatch(
                f"A series is one-dimensional, got {values.ndim} dimensions."
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteSeries("Series contains NaN or infinite values.")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def length(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __add__(self, other: "TimeSeries") -> "TimeSeries":
        return TimeSeries(self.values + as_values(other))

    def __sub__(self, other: "TimeSeries") -> "TimeSeries":
        return TimeSeries(self.values - as_values(other))


@dataclass(frozen=True, eq=False)
class TrajectoryMatrix:
    """
    An L×K matrix carrying a decomposition.

    `is_hankel` marks matrices with constant antidiagonals, i.e. the
    embeddings of a series of length L + K - 1.
    """

    entries: NDArray[np.float64]
    is_hankel: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or min(entries.shape) < 2:
            raise ShapeMismatch(
                f"A trajectory matrix is at least 2×2, got shape {entries.shape}."
            )
        object.__setattr__(self, "entries", _frozen(entries))

    @property
    def window(self) -> int:
        return self.entries.shape[0]

    @property
    def columns(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def series_length(self) -> int:
        return self.window + self.columns - 1


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Antidiagonal cell counts of an L×K matrix."""

    weights: NDArray[np.int64]
    window: int

    def __post_init__(self):
        object.__setattr__(
            self, "weights", _frozen(np.array(self.weights, dtype=np.int64))
        )

    @property
    def length(self) -> int:
        return self.weights.size


def as_values(series: "TimeSeries | ArrayLike") -> NDArray[np.float64]:
    """Return the samples of a series-like value as a float array."""
    if isinstance(series, TimeSeries):
        return series.values
    return TimeSeries(series).values


def as_series(series: "TimeSeries | ArrayLike") -> TimeSeries:
    """Return a `TimeSeries` for a series-like value."""
    if isinstance(series, TimeSeries):
        return series
    return TimeSeries(series)
