# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import group, reconstruct
from apps.iossa.entities import IterOSSAConfig, IterOSSAReport, MetricPair, MetricUpdate
from apps.oblique.entities import InnerProductSpec
from apps.oblique.services.metrics import orthonormalizer_from_basis
from apps.oblique.services.restricted_svd import lr_svd
from apps.series.services.embedding import hankelize

# Global
from common.exceptions import RankDeficientBasis, RankDeficientStack
from common.numerics import as_matrix, numerical_rank, rank_tolerance


logger = logging.getLogger(__name__)


# ==== Local ====
def _change(new, old) -> float:
    return max(float(np.mean((a.values - b.values) ** 2)) for a, b in zip(new, old))


# ==== Services ====
def space_projectors(matrix: ArrayLike) -> tuple[NDArray, NDArray, int]:
    """Return the orthogonal projectors on col(Y) and row(Y) and the rank of Y."""
    matrix = as_matrix(matrix)
    u, s, vt = spla.svd(matrix, full_matrices=False)
    rank = numerical_rank(s, rank_tolerance(matrix.shape))
    u, v = u[:, :rank], vt[:rank].T
    return u @ u.T, v @ v.T, rank


def update_metrics(
    group_matrices: list[ArrayLike],
    partition: Grouping,
    col_projector: NDArray,
    row_projector: NDArray,
    kappa: float | None = None,
) -> MetricUpdate:
    """
    Compute the next metric pair from the current group matrices.

    Each group matrix is hankelized and its r_m leading singular vectors
    are projected on the column and row spaces of Y. With `kappa`, the
    vectors of the second group are scaled by √μ whenever the smallest
    leading eigenvalue of the first group falls below κ² times the
    largest one of the second; `corrected` tells whether that happened.
    """
    lefts, rights, eigenvalues = [], [], []
    for matrix, size in zip(group_matrices, partition.sizes):
        u, s, vt = spla.svd(hankelize(matrix).entries, full_matrices=False)
        lefts.append(col_projector @ u[:, :size])
        rights.append(row_projector @ vt[:size].T)
        eigenvalues.append(s[:size] ** 2)

    corrected = False
    if kappa is not None:
        smallest, largest = eigenvalues[0][-1], eigenvalues[1][0]
        if smallest <= 0:
            raise RankDeficientStack("First group has a zero leading eigenvalue.")
        if smallest < kappa**2 * largest:
            mu = kappa * np.sqrt(largest / smallest)
            lefts[1] = np.sqrt(mu) * lefts[1]
            rights[1] = np.sqrt(mu) * rights[1]
            corrected = True
            logger.debug("Sigma-correction applied with mu=%.6g", mu)

    try:
        left = orthonormalizer_from_basis(np.hstack(lefts))
        right = orthonormalizer_from_basis(np.hstack(rights))
    except RankDeficientBasis as exc:
        raise RankDeficientStack(
            f"Projected group bases are degenerate: {exc.message}"
        ) from exc
    return MetricUpdate(left, right, corrected)


def iterate_ossa(matrix: ArrayLike, config: IterOSSAConfig) -> IterOSSAReport:
    """
    Run Iterative O-SSA on a matrix of rank r.

    Iterations stop once the largest mean squared change of a component
    falls below ε², or after `max_iter` iterations; the latter is
    reported with `converged=False`.
    """
    matrix = as_matrix(matrix)
    col_projector, row_projector, rank = space_projectors(matrix)
    partition = config.partition
    partition.check_partition(rank)
    first_size = partition.sizes[0]

    metrics = config.initial_metrics or MetricPair(
        InnerProductSpec.identity(matrix.shape[0]),
        InnerProductSpec.identity(matrix.shape[1]),
    )
    decomposition = lr_svd(matrix, *metrics)
    matrices = group(decomposition, partition)
    components = reconstruct(matrices)

    history = []
    converged = False
    iterations = 0
    while True:
        iterations += 1
        update = update_metrics(
            matrices, partition, col_projector, row_projector, kappa=config.kappa
        )
        if update.corrected:
            partition = Grouping.leading(first_size, rank)

        metrics = MetricPair(update.left, update.right)
        decomposition = lr_svd(matrix, *metrics)
        matrices = group(decomposition, partition)
        refined = reconstruct(matrices)

        change = _change(refined, components)
        history.append(change)
        components = refined
        logger.debug("Iteration %d: change %.3e", iterations, change)

        if change < config.epsilon**2:
            converged = True
            break
        if iterations >= config.max_iter:
            break

    logger.info(
        "Iterative O-SSA %s after %d iterations",
        "converged" if converged else "stopped",
        iterations,
    )
    return IterOSSAReport(
        components=components,
        iterations=iterations,
        converged=converged,
        history=history,
        final_metrics=metrics,
        decomposition=decomposition,
        partition=partition,
    )
