# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.oblique.entities import (
    DecompositionKind,
    InnerProductSpec,
    MatrixDecomposition,
)
from apps.oblique.services.metrics import (
    check_consistency,
    check_metric_shapes,
    orthonormalizer_from_basis,
    pseudo_inverse,
)

# Global
from common.exceptions import InconsistentMetric, NonPositiveScale, ShapeMismatch
from common.numerics import as_matrix, numerical_rank, numerics_setting, rank_tolerance


logger = logging.getLogger(__name__)


def orient_signs(left: NDArray, right: NDArray) -> tuple[NDArray, NDArray]:
    """Flip vector pairs so the largest-magnitude entry of each Pᵢ is positive."""
    if left.shape[1] == 0:
        return left, right
    pivots = np.argmax(np.abs(left), axis=0)
    signs = np.sign(left[pivots, np.arange(left.shape[1])])
    signs[signs == 0] = 1.0
    return left * signs, right * signs


def _check_consistent(
    matrix: NDArray,
    left: InnerProductSpec,
    right: InnerProductSpec,
) -> None:
    residuals = check_consistency(matrix, left, right)
    threshold = numerics_setting("CONSISTENCY_THRESHOLD")
    if max(residuals) <= threshold:
        return

    message = (
        f"Metrics are not consistent with the matrix: residuals "
        f"{residuals.left:.3e} (left), {residuals.right:.3e} (right)."
    )
    if numerics_setting("CONSISTENCY_POLICY") == "fail":
        raise InconsistentMetric(message)
    logger.warning(message)


def lr_svd(
    matrix: ArrayLike,
    left: InnerProductSpec,
    right: InnerProductSpec,
) -> MatrixDecomposition:
    """
    Compute the (L,R)-SVD of a matrix.

    The ordinary SVD of O_L Y O_Rᵀ gives σᵢ, and the vectors are mapped
    back with Pᵢ = O_L† Uᵢ and Qᵢ = O_R† Vᵢ. Under identity metrics the
    result is the ordinary SVD. Equal σᵢ keep the order of the
    underlying SVD, where the decomposition is not unique.
    """
    matrix = as_matrix(matrix)
    check_metric_shapes(matrix, left, right)
    _check_consistent(matrix, left, right)

    tol = rank_tolerance(matrix.shape)
    matrix_rank = numerical_rank(spla.svdvals(matrix), tol)
    if matrix_rank > min(left.rank, right.rank):
        raise InconsistentMetric(
            f"Matrix rank {matrix_rank} exceeds the metric ranks "
            f"({left.rank}, {right.rank})."
        )

    u, s, vt = spla.svd(left.factor @ matrix @ right.factor.T, full_matrices=False)
    rank = numerical_rank(s, tol)
    p = pseudo_inverse(left.factor) @ u[:, :rank]
    q = pseudo_inverse(right.factor) @ vt[:rank].T
    p, q = orient_signs(p, q)

    logger.debug("(L,R)-SVD of %d×%d matrix has rank %d", *matrix.shape, rank)
    return MatrixDecomposition(
        sigmas=s[:rank],
        left=p,
        right=q,
        kind=DecompositionKind.OBLIQUE,
        left_metric=left,
        right_metric=right,
    )


def rescale_decomposition(
    decomposition: MatrixDecomposition,
    mu: ArrayLike,
    nu: ArrayLike,
) -> MatrixDecomposition:
    """
    Move positive scales between σᵢ and the vectors of a decomposition.

    Dividing σᵢ by μᵢνᵢ while scaling Pᵢ by μᵢ and Qᵢ by νᵢ keeps the
    same matrix; the triples are re-sorted by σ̃ and paired with the metrics
    in which the new vectors are orthonormal.
    """
    mu = np.asarray(mu, dtype=float).ravel()
    nu = np.asarray(nu, dtype=float).ravel()
    if mu.size != decomposition.rank or nu.size != decomposition.rank:
        raise ShapeMismatch(
            f"Expected {decomposition.rank} scales, got {mu.size} and {nu.size}."
        )
    if np.any(mu <= 0) or np.any(nu <= 0):
        raise NonPositiveScale("Scaling factors must be strictly positive.")

    sigmas = decomposition.sigmas / (mu * nu)
    order = np.argsort(-sigmas, kind="stable")
    left = (decomposition.left * mu)[:, order]
    right = (decomposition.right * nu)[:, order]
    return MatrixDecomposition(
        sigmas=sigmas[order],
        left=left,
        right=right,
        kind=DecompositionKind.OBLIQUE,
        left_metric=orthonormalizer_from_basis(left),
        right_metric=orthonormalizer_from_basis(right),
    )
