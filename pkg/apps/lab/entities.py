# Core
import math
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from backports.strenum import StrEnum
from typing import NamedTuple

# Libs
import numpy as np
from numpy.typing import NDArray

# Apps
from apps.decomposition.entities import Grouping, SSAResult
from apps.diagnostics.entities import CorrelationMatrix
from apps.iossa.entities import IterOSSAReport, MetricPair
from apps.oblique.entities import MatrixDecomposition
from apps.series.entities import TimeSeries

# Global
from common.exceptions import InvalidConfig


class Term(NamedTuple):
    """
    One term A·n^j·e^{αn}·sin(2πωn + φ) of a signal.

    Terms with ω = 0 carry no sine factor, so they are polynomial-exponential.
    """

    amplitude: float = 1.0
    frequency: float = 0.0
    phase: float = 0.0
    rate: float = 0.0
    degree: int = 0


@dataclass(frozen=True)
class SignalSpec:
    """A sum of polynomial-exponential-sinusoidal terms sampled at n = 1..N."""

    terms: tuple[Term, ...]
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise InvalidConfig("A signal needs at least one sample.")
        for term in self.terms:
            if not all(math.isfinite(value) for value in term):
                raise InvalidConfig(f"Term {term} has non-finite parameters.")
            if not 0 <= term.frequency <= 0.5:
                raise InvalidConfig(
                    f"Frequency {term.frequency} is outside [0, 0.5]."
                )
            if term.degree < 0:
                raise InvalidConfig("Polynomial degree must be non-negative.")


@dataclass(frozen=True)
class NoiseSpec:
    """White Gaussian noise of standard deviation δ from a seeded generator."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidConfig("Noise level must be non-negative.")


class Method(StrEnum):
    BASIC = "basic"
    IOSSA = "iossa"
    DERIV = "deriv"


@dataclass(frozen=True)
class PipelineSpec:
    """
    A decomposition pipeline run on one series.

    For the nested methods, `groups` selects the Basic SSA components to
    refine and `partition` regroups the refined ones; without it the
    partition follows `groups`.
    """

    window: int
    method: Method
    groups: Grouping
    partition: Grouping | None = None
    epsilon: float = 1e-5
    max_iter: int = 200
    kappa: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.method == Method.DERIV and self.gamma is None:
            raise InvalidConfig("DerivSSA needs the derivative weight gamma.")
        if self.method != Method.DERIV and self.gamma is not None:
            raise InvalidConfig("gamma only applies to the deriv method.")
        if self.method != Method.IOSSA and self.kappa is not None:
            raise InvalidConfig("kappa only applies to the iossa method.")
        if self.method == Method.BASIC and self.partition is not None:
            raise InvalidConfig("A partition only applies to the nested methods.")


@dataclass(frozen=True, eq=False)
class PipelineOutcome:
    spec: PipelineSpec
    ssa: SSAResult
    components: list[TimeSeries]
    residual: TimeSeries
    decomposition: MatrixDecomposition = field(repr=False)
    partition: Grouping
    metrics: MetricPair | None = None
    report: IterOSSAReport | None = None


@dataclass(frozen=True, eq=False)
class PipelineDiagnostics:
    """Separability measures of a pipeline outcome."""

    wcor_after: CorrelationMatrix
    tau_after: list[float]
    wcor_before: CorrelationMatrix | None = None
    tau_before: list[float] | None = None
    lr_wcor: CorrelationMatrix | None = None
    iterations: int | None = None
    converged: bool | None = None
    history: list[float] | None = None
    frequencies: list[float] | None = None


class CheckMode(StrEnum):
    ABS = "abs"
    REL = "rel"
    ABS_UPPER = "abs_upper"
    LOWER = "lower"


@dataclass(frozen=True)
class Expectation:
    """An expected value with the rule deciding whether a result matches it."""

    value: float
    mode: CheckMode = CheckMode.ABS
    tolerance: float = 0.0

    def holds(self, computed: float | None) -> bool:
        if computed is None or not math.isfinite(computed):
            return False
        match self.mode:
            case CheckMode.ABS:
                return abs(computed - self.value) <= self.tolerance
            case CheckMode.REL:
                return abs(computed - self.value) <= self.tolerance * abs(self.value)
            case CheckMode.ABS_UPPER:
                return abs(computed) <= self.value
            case CheckMode.LOWER:
                return computed >= self.value


class Check(NamedTuple):
    metric: str
    computed: float | None
    expected: Expectation
    passed: bool


@dataclass(frozen=True)
class ScenarioSpec:
    """A named experiment of the scenario registry."""

    name: str
    description: str
    method: Method
    groups: str
    params: dict
    partition: str | None = None
    blocks: str | None = None
    expected: dict[str, Expectation] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    scenario: ScenarioSpec
    params: dict
    metrics: dict[str, float | None]
    checks: list[Check]
    outcome: PipelineOutcome = field(repr=False)
    diagnostics: PipelineDiagnostics = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


@dataclass(frozen=True, eq=False)
class MonteCarloSummary:
    """
    Winsorized mean of one metric over the replicates of a grid point.

    Failed replicates are left out of `per_replicate`; the mean is NaN
    when every replicate failed.
    """

    metric: str
    per_replicate: NDArray[np.float64]
    winsorized_mean: float
    winsorize_fraction: float

    def __post_init__(self):
        if not 0 <= self.winsorize_fraction < 0.5:
            raise InvalidConfig("The winsorizing fraction must lie in [0, 0.5).")

    @property
    def replicates(self) -> int:
        return self.per_replicate.size


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """Summaries of the replicates run at one point of a parameter grid."""

    params: dict
    summaries: dict[str, MonteCarloSummary]
    replicates: int
    failures: int

    def rmse(self, metric: str) -> float:
        return math.sqrt(self.summaries[metric].winsorized_mean)
