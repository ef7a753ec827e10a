# Core
import logging

# Libs
import numpy as np

# Apps
from apps.decomposition.entities import Grouping
from apps.diagnostics.services.correlation import cross_block_max
from apps.lab.entities import (
    Check,
    NoiseSpec,
    PipelineDiagnostics,
    PipelineSpec,
    ScenarioResult,
    ScenarioSpec,
    SignalSpec,
    Term,
)
from apps.lab.services.pipeline import pipeline_diagnostics, run_pipeline
from apps.lab.services.registry import apply_overrides, get_scenario
from apps.lab.services.signals import add_noise, generate
from apps.series.entities import TimeSeries


logger = logging.getLogger(__name__)


# ==== Local ====
def _pair(matrix) -> float | None:
    if matrix is None or len(matrix) != 2:
        return None
    return float(matrix.values[0, 1])


def _mean(values) -> float | None:
    return float(np.mean(values)) if values else None


# ==== Services ====
def scenario_terms(params: dict) -> tuple[Term, Term]:
    return tuple(
        Term(
            amplitude=params[f"amplitude{index}"],
            frequency=params[f"omega{index}"],
            phase=params[f"phase{index}"],
        )
        for index in (1, 2)
    )


def scenario_series(params: dict) -> TimeSeries:
    """Generate the noisy two-term signal a scenario runs on."""
    signal = generate(SignalSpec(scenario_terms(params), params["length"]))
    return add_noise(signal, NoiseSpec(sigma=params["sigma"], seed=params["seed"]))


def scenario_pipeline(scenario: ScenarioSpec, params: dict) -> PipelineSpec:
    return PipelineSpec(
        window=params["window"],
        method=scenario.method,
        groups=Grouping.parse(scenario.groups),
        partition=Grouping.parse(scenario.partition) if scenario.partition else None,
        epsilon=params["epsilon"],
        max_iter=params["max_iter"],
        kappa=params.get("kappa"),
        gamma=params.get("gamma"),
    )


def scenario_metrics(
    diagnostics: PipelineDiagnostics, *, blocks: str | None = None
) -> dict[str, float]:
    """Flatten diagnostics into the named scalars expectations refer to."""
    metrics = {
        "wcor_before": _pair(diagnostics.wcor_before),
        "wcor_after": _pair(diagnostics.wcor_after),
        "lr_wcor": _pair(diagnostics.lr_wcor),
        "tau_before": _mean(diagnostics.tau_before),
        "tau_after": _mean(diagnostics.tau_after),
        "iterations": diagnostics.iterations,
        "converged": (
            None if diagnostics.converged is None else float(diagnostics.converged)
        ),
    }
    estimates = sorted(f for f in diagnostics.frequencies or [] if f is not None)
    for index, frequency in enumerate(estimates, start=1):
        metrics[f"frequency_{index}"] = frequency
    if blocks:
        first, second = Grouping.parse(blocks).zero_based()[:2]
        metrics["cross_block"] = cross_block_max(diagnostics.wcor_after, first, second)
    return {name: value for name, value in metrics.items() if value is not None}


def run_scenario(name: str, *, overrides: dict | None = None) -> ScenarioResult:
    """Run a registered scenario and check it against its expected values."""
    scenario = get_scenario(name)
    params = apply_overrides(scenario.params, overrides)
    spec = scenario_pipeline(scenario, params)
    outcome = run_pipeline(scenario_series(params), spec)
    diagnostics = pipeline_diagnostics(outcome, frequencies=True)
    metrics = scenario_metrics(diagnostics, blocks=scenario.blocks)

    checks = [
        Check(metric, computed, expected, expected.holds(computed))
        for metric, expected in scenario.expected.items()
        for computed in [metrics.get(metric)]
    ]
    result = ScenarioResult(
        scenario=scenario,
        params=params,
        metrics=metrics,
        checks=checks,
        outcome=outcome,
        diagnostics=diagnostics,
    )
    logger.info(
        "Scenario %s %s (%d checks)",
        name,
        "passed" if result.passed else "failed",
        len(checks),
    )
    return result
