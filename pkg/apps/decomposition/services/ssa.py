# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.decomposition.entities import Grouping, SSAResult
from apps.oblique.entities import (
    DecompositionKind,
    InnerProductSpec,
    MatrixDecomposition,
)
from apps.oblique.services.restricted_svd import lr_svd, orient_signs
from apps.series.entities import TimeSeries, TrajectoryMatrix, as_series
from apps.series.services.embedding import embed, unembed

# Global
from common.exceptions import IndexOutOfRange, ShapeMismatch
from common.numerics import as_matrix, numerical_rank, rank_tolerance


logger = logging.getLogger(__name__)


def svd_decompose(matrix: TrajectoryMatrix | ArrayLike) -> MatrixDecomposition:
    """Return the ordinary SVD truncated to the numerical rank."""
    matrix = as_matrix(matrix)
    u, s, vt = spla.svd(matrix, full_matrices=False)
    rank = numerical_rank(s, rank_tolerance(matrix.shape))
    left, right = orient_signs(u[:, :rank], vt[:rank].T)
    return MatrixDecomposition(
        sigmas=s[:rank],
        left=left,
        right=right,
        kind=DecompositionKind.ORDINARY,
    )


def group(
    decomposition: MatrixDecomposition,
    grouping: Grouping,
) -> list[NDArray[np.float64]]:
    """Return X_I = Σ_{i∈I} σᵢPᵢQᵢᵀ for each group I."""
    grouping.check_range(decomposition.rank)
    return [decomposition.matrix(indices) for indices in grouping.zero_based()]


def reconstruct(matrices: list[ArrayLike]) -> list[TimeSeries]:
    """Diagonal-average each matrix into a series."""
    matrices = [as_matrix(matrix) for matrix in matrices]
    shapes = {matrix.shape for matrix in matrices}
    if len(shapes) > 1:
        raise ShapeMismatch(f"Matrices have different shapes {sorted(shapes)}.")
    return [unembed(matrix) for matrix in matrices]


def basic_ssa(
    series: TimeSeries | ArrayLike,
    window: int,
    grouping: Grouping,
) -> SSAResult:
    """Run embedding, SVD, grouping and diagonal averaging."""
    series = as_series(series)
    trajectory = embed(series, window)
    decomposition = svd_decompose(trajectory)
    logger.info(
        "SSA of %d samples with L=%d: %d components",
        series.length,
        window,
        decomposition.rank,
    )

    matrices = group(decomposition, grouping)
    components = reconstruct(matrices)
    residual = series.values - sum(
        (component.values for component in components), np.zeros(series.length)
    )
    residual_matrix = trajectory.entries - sum(matrices, np.zeros(trajectory.shape))
    return SSAResult(
        series=series,
        window=window,
        decomposition=decomposition,
        grouping=grouping,
        grouped_matrices=matrices,
        components=components,
        residual=TimeSeries(residual),
        residual_matrix=residual_matrix,
    )


def nested_ossa(
    matrix: ArrayLike,
    left: InnerProductSpec,
    right: InnerProductSpec,
    grouping: Grouping,
) -> list[TimeSeries]:
    """
    Refine a matrix with its (L,R)-SVD and regroup it.

    The groups must partition the components 1..r of the (L,R)-SVD, so
    the refined series add up to the diagonal average of the input.
    """
    decomposition = lr_svd(matrix, left, right)
    grouping.check_partition(decomposition.rank)
    return reconstruct(group(decomposition, grouping))


def contributions(decomposition: MatrixDecomposition) -> NDArray[np.float64]:
    """Return the share σₖ²/Σσᵢ² of every component."""
    squares = decomposition.sigmas**2
    total = squares.sum()
    if total == 0:
        return np.zeros_like(squares)
    return squares / total


def nested_partition(grouping: Grouping) -> tuple[tuple[int, ...], Grouping]:
    """
    Split chosen groups into a component set and a refined partition.

    For groups {2,8} and {3..6} the set is I = (2,3,4,5,6,8) and the
    partition of 1..|I| is {1,6}, {2,3,4,5}.
    """
    indices = grouping.indices
    position = {index: i for i, index in enumerate(indices, start=1)}
    refined = Grouping(tuple(tuple(position[i] for i in g) for g in grouping))
    return indices, refined


def splice_refinement(
    result: SSAResult,
    group_index: int,
    refined: list[TimeSeries],
) -> list[TimeSeries]:
    """Replace one component of a result by its refined parts."""
    if not 1 <= group_index <= len(result.components):
        raise IndexOutOfRange(
            f"Group {group_index} requested but the result has "
            f"{len(result.components)}."
        )

    replaced = result.components[group_index - 1].values
    parts = [as_series(part) for part in refined]
    if any(part.length != replaced.size for part in parts):
        raise ShapeMismatch("Refined components differ in length from the result.")

    total = sum((part.values for part in parts), np.zeros_like(replaced))
    if np.linalg.norm(total - replaced) > 1e-8 * max(np.linalg.norm(replaced), 1.0):
        raise ShapeMismatch("Refined components do not add up to the replaced one.")

    components = list(result.components)
    components[group_index - 1 : group_index] = parts
    return components
