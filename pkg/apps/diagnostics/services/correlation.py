# Libs
import numpy as np
import scipy.linalg as spla
from numpy.typing import ArrayLike

# Apps
from apps.diagnostics.entities import CorrelationMatrix
from apps.oblique.entities import InnerProductSpec, MatrixDecomposition
from apps.series.entities import TimeSeries, as_series
from apps.series.services.embedding import embed, w_weights

# Global
from common.exceptions import InvalidConfig, ShapeMismatch, ZeroNorm
from common.numerics import as_matrix


# ==== Local ====
def _cosine(inner: float, first_norm: float, second_norm: float) -> float:
    if not (first_norm > 0 and second_norm > 0):
        raise ZeroNorm("Correlation of a component with zero norm.")
    return float(np.clip(inner / (first_norm * second_norm), -1.0, 1.0))


def _check_shapes(first, second) -> None:
    if first.shape != second.shape:
        raise ShapeMismatch(f"Shapes {first.shape} and {second.shape} differ.")


# ==== Services ====
def w_correlation(
    first: TimeSeries | ArrayLike, second: TimeSeries | ArrayLike, window: int
) -> float:
    """Return the weighted cosine ρ_w of two series of equal length."""
    x, y = as_series(first).values, as_series(second).values
    _check_shapes(x, y)
    weights = w_weights(x.size, window).weights
    return _cosine(
        np.sum(weights * x * y),
        np.sqrt(np.sum(weights * x * x)),
        np.sqrt(np.sum(weights * y * y)),
    )


def w_correlation_matrix(
    components: list[TimeSeries], window: int, labels: list[str] | None = None
) -> CorrelationMatrix:
    """Return the matrix of w-correlations between components."""
    series = [as_series(c).values for c in components]
    lengths = sorted({s.size for s in series})
    if len(lengths) != 1:
        raise ShapeMismatch(f"Components must share one length, got {lengths}.")
    values = np.vstack(series)
    weights = w_weights(values.shape[1], window).weights

    gram = (values * weights) @ values.T
    norms = np.sqrt(np.diag(gram))
    if not np.all(norms > 0):
        raise ZeroNorm("Correlation of a component with zero norm.")
    return CorrelationMatrix(gram / np.outer(norms, norms), labels or [])


def f_correlation(first: ArrayLike, second: ArrayLike) -> float:
    """Return the Frobenius cosine of two matrices."""
    a, b = as_matrix(first), as_matrix(second)
    _check_shapes(a, b)
    return _cosine(np.sum(a * b), spla.norm(a), spla.norm(b))


def lr_w_correlation(
    first: ArrayLike,
    second: ArrayLike,
    left: InnerProductSpec,
    right: InnerProductSpec,
) -> float:
    """
    Return the (L,R) cosine ⟨O_L A O_Rᵀ, O_L B O_Rᵀ⟩_F / (‖A‖‖B‖).

    Norms are (L,R)-norms. When the metrics are not consistent with the
    matrices, only their projections are compared.
    """
    a, b = as_matrix(first), as_matrix(second)
    _check_shapes(a, b)
    if a.shape != (left.dimension, right.dimension):
        raise ShapeMismatch(
            f"Metrics of dimensions ({left.dimension}, {right.dimension}) "
            f"do not fit a {a.shape[0]}×{a.shape[1]} matrix."
        )
    return f_correlation(
        left.factor @ a @ right.factor.T, left.factor @ b @ right.factor.T
    )


def max_f_correlation(decomposition: MatrixDecomposition) -> float:
    """Return the largest |F-correlation| between distinct elementary matrices."""
    if decomposition.rank < 2:
        return 0.0
    left, right = decomposition.left, decomposition.right
    scaled = np.outer(decomposition.sigmas, decomposition.sigmas)
    gram = scaled * (left.T @ left) * (right.T @ right)
    norms = np.sqrt(np.diag(gram))
    correlations = np.abs(gram / np.outer(norms, norms))
    np.fill_diagonal(correlations, 0.0)
    return float(min(correlations.max(), 1.0))


def tau_rank_closeness(
    component: TimeSeries | ArrayLike, window: int, rank: int
) -> float:
    """Return τ_r = 1 − Σᵢ≤r λᵢ / ‖X‖²_F for the trajectory matrix X."""
    if rank < 1:
        raise InvalidConfig("The rank of a component must be at least 1.")
    eigenvalues = spla.svdvals(embed(component, window).entries) ** 2
    total = eigenvalues.sum()
    if not total > 0:
        raise ZeroNorm("Rank closeness of a zero component.")
    return float(np.clip(1.0 - eigenvalues[:rank].sum() / total, 0.0, 1.0))


def mean_tau(components: list[TimeSeries], window: int, ranks: list[int]) -> float:
    """Return the mean τ of the components for their target ranks."""
    if len(components) != len(ranks):
        raise ShapeMismatch(f"{len(ranks)} ranks given for {len(components)} groups.")
    return float(
        np.mean([tau_rank_closeness(c, window, r) for c, r in zip(components, ranks)])
    )


def cross_block_max(matrix: CorrelationMatrix, first, second) -> float:
    """Return max |ρ| over the block between two sets of 0-based positions."""
    block = matrix.values[np.ix_(list(first), list(second))]
    return float(np.abs(block).max()) if block.size else 0.0
