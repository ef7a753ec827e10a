# Core
from dataclasses import dataclass, field

# Libs
import numpy as np
from numpy.typing import NDArray

# Global
from common.exceptions import ShapeMismatch


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """
    Symmetric matrix of correlations between labelled components.

    Entries are clipped to [−1, 1] and the diagonal is set to 1.
    """

    values: NDArray[np.float64]
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ShapeMismatch("A correlation matrix must be square.")
        if not np.allclose(values, values.T, atol=1e-12):
            raise ShapeMismatch("A correlation matrix must be symmetric.")
        values = np.clip((values + values.T) / 2, -1.0, 1.0)
        np.fill_diagonal(values, 1.0)
        values.setflags(write=False)

        labels = list(self.labels) or [f"F{i}" for i in range(1, len(values) + 1)]
        if len(labels) != len(values):
            raise ShapeMismatch(
                f"{len(labels)} labels given for {len(values)} components."
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def as_rows(self) -> list[list[str | float]]:
        """Rows of the matrix prefixed by their label."""
        return [
            [label, *row] for label, row in zip(self.labels, self.values.tolist())
        ]


@dataclass(frozen=True, eq=False)
class SignalRoots:
    """
    Characteristic roots μ of a finite-rank series.

    `frequencies` and `moduli` list one entry per real root and per
    conjugate pair, in cycles per sample within [0, 0.5], sorted by
    frequency; `roots` keeps every root.
    """

    roots: NDArray[np.complex128]
    frequencies: NDArray[np.float64]
    moduli: NDArray[np.float64]

    @classmethod
    def from_roots(cls, roots) -> "SignalRoots":
        roots = np.asarray(roots, dtype=complex)
        roots = roots[np.lexsort((-roots.imag, np.abs(np.angle(roots))))]
        upper = roots[roots.imag >= 0]
        frequencies = np.abs(np.angle(upper)) / (2 * np.pi)
        moduli = np.abs(upper)
        order = np.argsort(frequencies, kind="stable")
        return cls(roots=roots, frequencies=frequencies[order], moduli=moduli[order])
