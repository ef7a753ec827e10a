# Core
import logging

# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike, NDArray

# Apps
from apps.diagnostics.entities import SignalRoots
from apps.series.entities import TimeSeries
from apps.series.services.embedding import embed

# Global
from common.exceptions import RankDeficientBasis, ShapeMismatch
from common.numerics import as_matrix, rank_tolerance


logger = logging.getLogger(__name__)


def esprit_frequencies(basis: ArrayLike) -> SignalRoots:
    """
    Estimate the signal roots spanned by an L×r basis with LS-ESPRIT.

    The shift equation B̲ Ψ ≈ B̄ between the basis without its last row
    and the basis without its first row is solved by least squares; the
    eigenvalues of Ψ are the roots.
    """
    basis = as_matrix(basis)
    rows, rank = basis.shape
    if rank >= rows:
        raise RankDeficientBasis(
            f"A basis of {rank} vectors needs more than {rank} rows."
        )

    shift, _, found, _ = spla.lstsq(
        basis[:-1], basis[1:], cond=rank_tolerance(basis.shape)
    )
    if found < rank:
        raise RankDeficientBasis(
            f"The shifted basis has rank {found}, expected {rank}."
        )
    roots = spla.eigvals(shift)
    logger.debug("ESPRIT roots: %s", np.round(roots, 6))
    return SignalRoots.from_roots(roots)


def component_frequencies(
    component: TimeSeries | ArrayLike, window: int, rank: int
) -> SignalRoots:
    """Estimate the roots of a component from its r leading left vectors."""
    u, _, _ = spla.svd(embed(component, window).entries, full_matrices=False)
    return esprit_frequencies(u[:, :rank])


def dominant_frequency(roots: SignalRoots) -> float:
    """Return the frequency of the root closest to the unit circle."""
    return float(roots.frequencies[np.argmin(np.abs(roots.moduli - 1))])


def scatter_pairs(vectors: list[ArrayLike]) -> list[NDArray[np.float64]]:
    """Return the points (Vᵢ, Vᵢ₊₁) of consecutive vector pairs."""
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    if len(vectors) < 2:
        raise ShapeMismatch("Scatter plots need at least 2 vectors.")
    if len({v.shape for v in vectors}) != 1:
        raise ShapeMismatch("Vectors must share one length.")
    return [np.column_stack(pair) for pair in zip(vectors, vectors[1:])]
