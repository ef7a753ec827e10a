# Libs
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.series.entities import (
    TimeSeries,
    TrajectoryMatrix,
    WeightVector,
    as_series,
)

# Global
from common.exceptions import SeriesTooShort, WindowOutOfRange
from common.numerics import as_matrix


def check_window(length: int, window: int) -> None:
    """Check that a window satisfies 1 < L < N."""
    if not 1 < window < length:
        raise WindowOutOfRange(
            f"Window length {window} must satisfy 1 < L < N = {length}."
        )


def embed(series: TimeSeries | ArrayLike, window: int) -> TrajectoryMatrix:
    """Return the L-trajectory (Hankel) matrix of a series."""
    values = as_series(series).values
    check_window(values.size, window)

    entries = sliding_window_view(values, window).T
    return TrajectoryMatrix(entries, is_hankel=True)


def w_weights(length: int, window: int) -> WeightVector:
    """Return w_n = min(n, L, K, N - n + 1) for n = 1..N."""
    check_window(length, window)

    columns = length - window + 1
    n = np.arange(1, length + 1)
    weights = np.minimum(np.minimum(n, length - n + 1), min(window, columns))
    return WeightVector(weights, window=window)


def _antidiagonal_means(entries: NDArray) -> NDArray:
    rows, columns = entries.shape
    indices = np.add.outer(np.arange(rows), np.arange(columns)).ravel()
    sums = np.bincount(indices, weights=entries.ravel(), minlength=rows + columns - 1)
    counts = w_weights(rows + columns - 1, rows).weights
    return sums / counts


def hankelize(matrix: TrajectoryMatrix | ArrayLike) -> TrajectoryMatrix:
    """Replace every antidiagonal of a matrix by its mean."""
    if isinstance(matrix, TrajectoryMatrix) and matrix.is_hankel:
        return matrix

    entries = as_matrix(matrix)
    return embed(_antidiagonal_means(entries), entries.shape[0])


def unembed(matrix: TrajectoryMatrix | ArrayLike) -> TimeSeries:
    """Return the series obtained by diagonal averaging."""
    if isinstance(matrix, TrajectoryMatrix) and matrix.is_hankel:
        entries = matrix.entries
        return TimeSeries(np.concatenate([entries[:, 0], entries[-1, 1:]]))

    return TimeSeries(_antidiagonal_means(as_matrix(matrix)))


def diff_series(series: TimeSeries | ArrayLike) -> TimeSeries:
    """Return the first differences x_{n+1} - x_n."""
    values = as_series(series).values
    if values.size < 2:
        raise SeriesTooShort("Differencing needs at least 2 samples.")
    return TimeSeries(np.diff(values))
