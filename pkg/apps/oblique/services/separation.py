# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike

# Apps
from apps.oblique.entities import InnerProductSpec
from apps.oblique.services.metrics import (
    check_metric_shapes,
    orthonormalizer_from_basis,
)
from apps.series.entities import TimeSeries
from apps.series.services.embedding import embed

# Global
from common.numerics import as_matrix, numerical_rank, rank_tolerance


def separating_metrics(
    parts: list[TimeSeries | ArrayLike],
    window: int,
) -> tuple[InnerProductSpec, InnerProductSpec]:
    """
    Build a metric pair in which a sum of finite-rank series separates.

    The column and row bases of every part's trajectory matrix are
    stacked into P and Q; the pair (P†, Q†) makes the parts (L,R)
    bi-orthogonal. Raises `RankDeficientBasis` when the stacked bases
    are linearly dependent.
    """
    lefts, rights = [], []
    for part in parts:
        entries = embed(part, window).entries
        u, s, vt = spla.svd(entries, full_matrices=False)
        rank = numerical_rank(s, rank_tolerance(entries.shape))
        lefts.append(u[:, :rank])
        rights.append(vt[:rank].T)

    return (
        orthonormalizer_from_basis(np.hstack(lefts)),
        orthonormalizer_from_basis(np.hstack(rights)),
    )


def is_weakly_separable(
    first: ArrayLike,
    second: ArrayLike,
    *,
    left: InnerProductSpec | None = None,
    right: InnerProductSpec | None = None,
    tol: float = 1e-8,
) -> bool:
    """Check (L,R) orthogonality of both column and row spaces of two matrices."""
    first = as_matrix(first)
    second = as_matrix(second)
    left = left or InnerProductSpec.identity(first.shape[0])
    right = right or InnerProductSpec.identity(first.shape[1])
    check_metric_shapes(first, left, right)
    check_metric_shapes(second, left, right)

    columns = (left.factor @ first).T @ (left.factor @ second)
    rows = (first @ right.factor.T) @ (second @ right.factor.T).T
    bound = tol * np.linalg.norm(first) * np.linalg.norm(second)
    return bool(max(np.linalg.norm(columns), np.linalg.norm(rows)) <= bound)
