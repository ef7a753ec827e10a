# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.oblique.entities import ConsistencyResiduals, InnerProductSpec

# Global
from common.exceptions import (
    NegativeEigenvalue,
    NotSymmetric,
    RankDeficientBasis,
    ShapeMismatch,
)
from common.numerics import as_matrix, numerical_rank, rank_tolerance


logger = logging.getLogger(__name__)


def pseudo_inverse(matrix: ArrayLike, rel_tol: float | None = None) -> NDArray:
    """
    Return the Moore–Penrose pseudo-inverse computed through the SVD.

    Singular values at or below `rel_tol` times the largest one are
    treated as zero.
    """
    matrix = as_matrix(matrix)
    if rel_tol is None:
        rel_tol = rank_tolerance(matrix.shape)

    u, s, vt = spla.svd(matrix, full_matrices=False)
    rank = numerical_rank(s, rel_tol)
    if rank == 0:
        return np.zeros(matrix.shape[::-1])
    return (vt[:rank].T / s[:rank]) @ u[:, :rank].T


def factor_psd(matrix: ArrayLike, rel_tol: float | None = None) -> InnerProductSpec:
    """
    Factor a symmetric positive semidefinite matrix as A = OᵀO.

    Uses the symmetric eigendecomposition and drops eigenvalues at or
    below `rel_tol` times the largest, so rank-deficient metrics keep a
    factor with linearly independent rows.
    """
    matrix = as_matrix(matrix)
    if matrix.shape[0] != matrix.shape[1]:
        raise ShapeMismatch(f"A metric is square, got shape {matrix.shape}.")
    if rel_tol is None:
        rel_tol = rank_tolerance(matrix.shape)

    scale = np.linalg.norm(matrix)
    if np.linalg.norm(matrix - matrix.T) > rel_tol * scale:
        raise NotSymmetric("Metric matrix is not symmetric.")

    eigenvalues, eigenvectors = spla.eigh((matrix + matrix.T) / 2)
    top = max(eigenvalues[-1], 0.0)
    if eigenvalues[0] < -rel_tol * top:
        raise NegativeEigenvalue(
            f"Metric has eigenvalue {eigenvalues[0]:.3e} below zero."
        )

    keep = eigenvalues > rel_tol * top
    order = np.flatnonzero(keep)[::-1]
    factor = np.sqrt(eigenvalues[order])[:, None] * eigenvectors[:, order].T
    logger.debug("Factored %d×%d metric with rank %d", *matrix.shape, order.size)
    return InnerProductSpec(factor.reshape(order.size, matrix.shape[0]))


def orthonormalizer_from_basis(basis: ArrayLike) -> InnerProductSpec:
    """Return the metric with factor P† in which the columns of P are orthonormal."""
    basis = as_matrix(basis)
    rows, columns = basis.shape
    s = spla.svdvals(basis)
    if columns > rows or numerical_rank(s, rank_tolerance(basis.shape)) < columns:
        raise RankDeficientBasis(
            f"Basis of {columns} vectors in ℝ^{rows} is not of full column rank."
        )
    return InnerProductSpec(pseudo_inverse(basis))


def _range_residual(matrix: NDArray, metric: InnerProductSpec) -> float:
    norm = np.linalg.norm(matrix)
    if metric.rank == metric.dimension:
        return 0.0
    if norm == 0 or metric.rank == 0:
        return 0.0 if norm == 0 else 1.0
    basis = spla.orth(metric.factor.T, rcond=rank_tolerance(metric.factor.shape))
    return float(np.linalg.norm(matrix - basis @ (basis.T @ matrix)) / norm)


def check_consistency(
    matrix: ArrayLike,
    left: InnerProductSpec,
    right: InnerProductSpec,
) -> ConsistencyResiduals:
    """
    Measure how far a matrix lies outside the column spaces of two metrics.

    Returns the relative Frobenius residuals of projecting the columns
    of Y onto col(L) and the rows of Y onto col(R); zero means the pair
    is consistent with Y.
    """
    matrix = as_matrix(matrix)
    check_metric_shapes(matrix, left, right)
    return ConsistencyResiduals(
        left=_range_residual(matrix, left),
        right=_range_residual(matrix.T, right),
    )


def check_metric_shapes(
    matrix: NDArray,
    left: InnerProductSpec,
    right: InnerProductSpec,
) -> None:
    """Check that metrics act on the column and row spaces of a matrix."""
    rows, columns = matrix.shape
    if left.dimension != rows or right.dimension != columns:
        raise ShapeMismatch(
            f"Metrics of dimensions ({left.dimension}, {right.dimension}) "
            f"do not fit a {rows}×{columns} matrix."
        )
