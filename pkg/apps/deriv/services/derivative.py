# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.decomposition.services.ssa import group, reconstruct
from apps.deriv.entities import DerivConfig
from apps.oblique.entities import (
    DecompositionKind,
    InnerProductSpec,
    MatrixDecomposition,
)
from apps.oblique.services.restricted_svd import orient_signs
from apps.series.entities import TimeSeries

# Global
from common.exceptions import InvalidConfig, TooFewColumns
from common.numerics import as_matrix, numerical_rank, rank_tolerance


logger = logging.getLogger(__name__)


def column_diff(matrix: ArrayLike) -> NDArray[np.float64]:
    """Return [Y₂ − Y₁ : … : Y_K − Y_{K−1}]."""
    matrix = as_matrix(matrix)
    if matrix.shape[1] < 2:
        raise TooFewColumns("Column differences need at least 2 columns.")
    return np.diff(matrix, axis=1)


def deriv_metric(columns: int, gamma: float) -> InnerProductSpec:
    """
    Return the right metric E + γ²FᵀF of DerivSSA.

    F is the (K−1)×K first-difference matrix. The metric is positive
    definite, so it is factored with Cholesky.
    """
    if columns < 2:
        raise TooFewColumns("The derivative metric needs K ≥ 2.")
    if not gamma > 0:
        raise InvalidConfig("The derivative weight gamma must be positive.")

    difference = np.diff(np.eye(columns), axis=0)
    metric = np.eye(columns) + gamma**2 * difference.T @ difference
    return InnerProductSpec(spla.cholesky(metric, lower=False))


def deriv_decompose(matrix: ArrayLike, gamma: float) -> MatrixDecomposition:
    """
    Decompose a matrix through Z = [Y : γΦ(Y)].

    With the SVD Z = Σ σᵢUᵢWᵢᵀ the triples are (σᵢ, Uᵢ, YᵀUᵢ/σᵢ);
    the elementary matrices UᵢUᵢᵀY keep the column space of Y while
    the derivative rebalances the σᵢ. The right metric E + γ²FᵀF is
    not formed.
    """
    if not gamma > 0:
        raise InvalidConfig("The derivative weight gamma must be positive.")

    matrix = as_matrix(matrix)
    extended = np.hstack([matrix, gamma * column_diff(matrix)])
    u, s, _ = spla.svd(extended, full_matrices=False)
    rank = numerical_rank(s, rank_tolerance(extended.shape))

    left = u[:, :rank]
    right = matrix.T @ left / s[:rank]
    left, right = orient_signs(left, right)
    logger.debug("DerivSSA with gamma=%g has rank %d", gamma, rank)
    return MatrixDecomposition(
        sigmas=s[:rank],
        left=left,
        right=right,
        kind=DecompositionKind.OBLIQUE,
    )


def deriv_ssa(matrix: ArrayLike, config: DerivConfig) -> list[TimeSeries]:
    """Refine a matrix with DerivSSA and regroup it by the partition."""
    decomposition = deriv_decompose(matrix, config.gamma)
    config.partition.check_partition(decomposition.rank)
    return reconstruct(group(decomposition, config.partition))
