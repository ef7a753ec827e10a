# Core
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from backports.strenum import StrEnum
from typing import NamedTuple

# Libs
import numpy as np
from numpy.typing import NDArray

# Global
from common.exceptions import RankDeficientBasis, ShapeMismatch
from common.numerics import numerical_rank, rank_tolerance


class DecompositionKind(StrEnum):
    ORDINARY = "ordinary"
    OBLIQUE = "oblique"


@dataclass(frozen=True, eq=False)
class InnerProductSpec:
    """
    A positive semidefinite inner product A = OᵀO given by its factor O.

    The factor is r×M with linearly independent rows, so r is the rank of
    the metric and M the dimension of the space it acts on.
    """

    factor: NDArray[np.float64]

    def __post_init__(self):
        factor = np.array(self.factor, dtype=float)
        if factor.ndim != 2:
            raise ShapeMismatch("A metric factor is a matrix.")
        if factor.size:
            s = np.linalg.svd(factor, compute_uv=False)
            if numerical_rank(s, rank_tolerance(factor.shape)) < factor.shape[0]:
                raise RankDeficientBasis("Metric factor rows are linearly dependent.")
        factor.flags.writeable = False
        object.__setattr__(self, "factor", factor)

    @classmethod
    def identity(cls, dimension: int) -> "InnerProductSpec":
        """Return the standard inner product of ℝ^dimension."""
        return cls(np.eye(dimension))

    @property
    def rank(self) -> int:
        return self.factor.shape[0]

    @property
    def dimension(self) -> int:
        return self.factor.shape[1]

    @property
    def matrix(self) -> NDArray[np.float64]:
        return self.factor.T @ self.factor

    def inner(self, x: NDArray, y: NDArray) -> float:
        """Return ⟨x, y⟩_A."""
        return float((self.factor @ x) @ (self.factor @ y))


class Triple(NamedTuple):
    sigma: float
    left: NDArray[np.float64]
    right: NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class MatrixDecomposition:
    """
    Ordered triples (σᵢ, Pᵢ, Qᵢ) with Y = Σ σᵢ Pᵢ Qᵢᵀ.

    `left` and `right` hold the vectors Pᵢ and Qᵢ as columns. For the
    oblique kind, the columns are orthonormal in `left_metric` and
    `right_metric` when those are known.
    """

    sigmas: NDArray[np.float64]
    left: NDArray[np.float64]
    right: NDArray[np.float64]
    kind: DecompositionKind = DecompositionKind.ORDINARY
    left_metric: InnerProductSpec | None = None
    right_metric: InnerProductSpec | None = None

    def __post_init__(self):
        sigmas = np.array(self.sigmas, dtype=float).ravel()
        left = np.array(self.left, dtype=float)
        right = np.array(self.right, dtype=float)
        rank = sigmas.size
        if left.ndim != 2 or right.ndim != 2:
            raise ShapeMismatch("Decomposition vectors are stored as matrices.")
        if left.shape[1] != rank or right.shape[1] != rank:
            raise ShapeMismatch(
                f"{rank} singular values need {rank} vector pairs, "
                f"got {left.shape[1]} and {right.shape[1]}."
            )
        for name, value in (("sigmas", sigmas), ("left", left), ("right", right)):
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def rank(self) -> int:
        return self.sigmas.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.left.shape[0], self.right.shape[0]

    @property
    def triples(self) -> list[Triple]:
        return [
            Triple(float(self.sigmas[i]), self.left[:, i], self.right[:, i])
            for i in range(self.rank)
        ]

    def elementary(self, index: int) -> NDArray[np.float64]:
        """Return σᵢPᵢQᵢᵀ for a 0-based index."""
        return self.sigmas[index] * np.outer(self.left[:, index], self.right[:, index])

    def matrix(self, indices=None) -> NDArray[np.float64]:
        """Return Σ σᵢPᵢQᵢᵀ over 0-based indices (all by default)."""
        if indices is None:
            indices = range(self.rank)
        indices = list(indices)
        if not indices:
            return np.zeros(self.shape)
        return (self.left[:, indices] * self.sigmas[indices]) @ self.right[:, indices].T


class ConsistencyResiduals(NamedTuple):
    left: float
    right: float
