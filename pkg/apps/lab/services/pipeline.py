# Core
import logging

# Libs
import numpy as np

# Apps
from apps.decomposition.entities import Grouping
from apps.decomposition.services.ssa import (
    basic_ssa,
    group,
    nested_partition,
    reconstruct,
)
from apps.deriv.services.derivative import deriv_decompose, deriv_metric
from apps.diagnostics.entities import CorrelationMatrix
from apps.diagnostics.services.correlation import (
    lr_w_correlation,
    tau_rank_closeness,
    w_correlation_matrix,
)
from apps.diagnostics.services.esprit import dominant_frequency, esprit_frequencies
from apps.iossa.entities import IterOSSAConfig, MetricPair
from apps.iossa.services.iteration import iterate_ossa
from apps.lab.entities import (
    Method,
    PipelineDiagnostics,
    PipelineOutcome,
    PipelineSpec,
)
from apps.oblique.entities import InnerProductSpec
from apps.series.entities import TimeSeries, as_series

# Global
from constants import COMPONENT_LABEL


logger = logging.getLogger(__name__)


# ==== Local ====
def _labels(count: int) -> list[str]:
    return [COMPONENT_LABEL.format(index=index) for index in range(1, count + 1)]


def _group_frequency(decomposition, indices: list[int], window: int) -> float | None:
    if len(indices) >= window:
        return None
    return dominant_frequency(esprit_frequencies(decomposition.left[:, indices]))


def _lr_matrix(outcome: PipelineOutcome) -> CorrelationMatrix:
    matrices = group(outcome.decomposition, outcome.partition)
    left, right = outcome.metrics
    values = np.eye(len(matrices))
    for i in range(len(matrices)):
        for j in range(i + 1, len(matrices)):
            values[i, j] = values[j, i] = lr_w_correlation(
                matrices[i], matrices[j], left, right
            )
    return CorrelationMatrix(values, _labels(len(matrices)))


# ==== Services ====
def run_pipeline(series, spec: PipelineSpec) -> PipelineOutcome:
    """
    Run Basic SSA, then refine the chosen groups with a nested method.

    The refined components replace the chosen Basic SSA groups; whatever
    they leave out of the series is returned as the residual.
    """
    series = as_series(series)
    ssa = basic_ssa(series, spec.window, spec.groups)
    if spec.method == Method.BASIC:
        return PipelineOutcome(
            spec=spec,
            ssa=ssa,
            components=ssa.components,
            residual=ssa.residual,
            decomposition=ssa.decomposition,
            partition=spec.groups,
        )

    indices, derived = nested_partition(spec.groups)
    partition = spec.partition or derived
    matrix = ssa.decomposition.matrix([index - 1 for index in indices])
    report = None
    if spec.method == Method.IOSSA:
        report = iterate_ossa(
            matrix,
            IterOSSAConfig(
                partition=partition,
                epsilon=spec.epsilon,
                max_iter=spec.max_iter,
                kappa=spec.kappa,
            ),
        )
        components = report.components
        decomposition = report.decomposition
        partition = report.partition
        metrics = report.final_metrics
    else:
        decomposition = deriv_decompose(matrix, spec.gamma)
        partition.check_partition(decomposition.rank)
        components = reconstruct(group(decomposition, partition))
        metrics = MetricPair(
            InnerProductSpec.identity(matrix.shape[0]),
            deriv_metric(matrix.shape[1], spec.gamma),
        )

    logger.info(
        "%s refined %d Basic SSA components into %d groups",
        spec.method,
        len(indices),
        len(partition),
    )
    total = sum((c.values for c in components), np.zeros(series.length))
    return PipelineOutcome(
        spec=spec,
        ssa=ssa,
        components=components,
        residual=TimeSeries(series.values - total),
        decomposition=decomposition,
        partition=partition,
        metrics=metrics,
        report=report,
    )


def pipeline_diagnostics(
    outcome: PipelineOutcome, *, frequencies: bool = False
) -> PipelineDiagnostics:
    """Compute w-correlations, τ and, on request, LS-ESPRIT estimates."""
    window = outcome.spec.window
    partition: Grouping = outcome.partition
    components = outcome.components
    diagnostics = {
        "wcor_after": w_correlation_matrix(
            components, window, _labels(len(components))
        ),
        "tau_after": [
            tau_rank_closeness(c, window, size)
            for c, size in zip(components, partition.sizes)
        ],
    }
    if outcome.metrics is not None:
        before = outcome.ssa.components
        groups = outcome.spec.groups
        diagnostics["wcor_before"] = w_correlation_matrix(
            before, window, _labels(len(before))
        )
        diagnostics["tau_before"] = [
            tau_rank_closeness(c, window, size)
            for c, size in zip(before, groups.sizes)
        ]
        diagnostics["lr_wcor"] = _lr_matrix(outcome)
    if outcome.report is not None:
        diagnostics["iterations"] = outcome.report.iterations
        diagnostics["converged"] = outcome.report.converged
        diagnostics["history"] = outcome.report.history
    if frequencies:
        diagnostics["frequencies"] = [
            _group_frequency(outcome.decomposition, indices, window)
            for indices in partition.zero_based()
        ]
    return PipelineDiagnostics(**diagnostics)
