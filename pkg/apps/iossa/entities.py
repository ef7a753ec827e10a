# Core
from dataclasses import dataclass, field
from typing import NamedTuple

# Apps
from apps.decomposition.entities import Grouping
from apps.oblique.entities import InnerProductSpec, MatrixDecomposition
from apps.series.entities import TimeSeries

# Global
from common.exceptions import InvalidConfig, InvalidPartition


class MetricPair(NamedTuple):
    left: InnerProductSpec
    right: InnerProductSpec


class MetricUpdate(NamedTuple):
    left: InnerProductSpec
    right: InnerProductSpec
    corrected: bool


@dataclass(frozen=True)
class IterOSSAConfig:
    """
    Parameters of the Iterative O-SSA loop.

    `partition` splits the components 1..r of the refined matrix into
    two groups. `kappa` enables the sigma-correction; `initial_metrics`
    defaults to the identity pair, i.e. the ordinary SVD.
    """

    partition: Grouping
    epsilon: float = 1e-5
    max_iter: int = 200
    kappa: float | None = None
    initial_metrics: MetricPair | None = None

    def __post_init__(self):
        if len(self.partition) != 2:
            raise InvalidPartition(
                f"Iterative O-SSA refines two groups, got {len(self.partition)}."
            )
        if not self.epsilon > 0:
            raise InvalidConfig("The accuracy epsilon must be positive.")
        if self.max_iter < 1:
            raise InvalidConfig("The iteration cap must be at least 1.")
        if self.kappa is not None and not self.kappa > 1:
            raise InvalidConfig("The separating factor kappa must exceed 1.")


@dataclass(frozen=True, eq=False)
class IterOSSAReport:
    """Outcome of an Iterative O-SSA run."""

    components: list[TimeSeries]
    iterations: int
    converged: bool
    history: list[float]
    final_metrics: MetricPair
    decomposition: MatrixDecomposition = field(repr=False)
    partition: Grouping = field(repr=False)
