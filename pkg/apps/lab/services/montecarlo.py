# Core
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor

# Libs
import numpy as np
from scipy.stats.mstats import winsorize

# Apps
from apps.lab.entities import MonteCarloSummary, ScenarioSpec, SweepPoint
from apps.lab.services.pipeline import pipeline_diagnostics, run_pipeline
from apps.lab.services.registry import apply_overrides, get_scenario, parse_value
from apps.lab.services.scenarios import scenario_pipeline, scenario_series
from apps.lab.services.signals import replicate_seed

# Global
from common.exceptions import InvalidConfig, NumericalError
from common.functions import clean_spaces
from common.numerics import lab_setting


logger = logging.getLogger(__name__)


# ==== Local ====
def _replicate_metrics(scenario: ScenarioSpec, params: dict) -> dict[str, float]:
    spec = scenario_pipeline(scenario, params)
    outcome = run_pipeline(scenario_series(params), spec)
    diagnostics = pipeline_diagnostics(outcome, frequencies=True)
    metrics = {}
    if diagnostics.iterations is not None:
        metrics["iterations"] = float(diagnostics.iterations)

    truth = sorted([(params["omega1"], "omega1"), (params["omega2"], "omega2")])
    estimates = sorted(f for f in diagnostics.frequencies if f is not None)
    if len(estimates) == len(truth):
        for estimate, (frequency, name) in zip(estimates, truth):
            metrics[f"sq_error_{name}"] = (estimate - frequency) ** 2
    return metrics


def _summaries(rows: list[dict], fraction: float) -> dict[str, MonteCarloSummary]:
    names = sorted({name for row in rows for name in row})
    summaries = {}
    for name in names:
        values = np.array([row[name] for row in rows if name in row])
        summaries[name] = MonteCarloSummary(
            metric=name,
            per_replicate=values,
            winsorized_mean=winsorized_mean(values, fraction),
            winsorize_fraction=fraction,
        )
    return summaries


# ==== Sweeps ====
def parse_assignment(content: str) -> tuple[str, str]:
    """Split a `name=value` assignment."""
    name, sep, value = clean_spaces(content).partition("=")
    if not sep or not name or not value:
        raise InvalidConfig(f"Expected name=value, got {content!r}.")
    return name, value


def parse_sweep(content: str) -> tuple[str, list[int | float]]:
    """
    Parse `name=start:stop:step` or `name=v1,v2,...` into grid values.

    Ranges include `stop` when it lies on the step grid.
    """
    name, value = parse_assignment(content)
    if ":" not in value:
        return name, [parse_value(name, item) for item in value.split(",")]

    try:
        start, stop, step = (float(part) for part in value.split(":"))
    except ValueError as exc:
        raise InvalidConfig(f"Expected start:stop:step, got {value!r}.") from exc
    if not step > 0 or stop < start:
        raise InvalidConfig(f"Range {value!r} is empty.")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    values = [round(start + k * step, 12) for k in range(count)]
    return name, [parse_value(name, value) for value in values]


def sweep_grid(
    sweep: dict[str, list], skip: list[tuple[str, float]] | None = None
) -> list[dict]:
    """Return the cartesian product of a sweep without the skipped points."""
    names = list(sweep)
    grid = itertools.product(*sweep.values())
    points = [dict(zip(names, values)) for values in grid]
    for name, value in skip or []:
        points = [p for p in points if not np.isclose(p.get(name, np.nan), value)]
    if not points:
        raise InvalidConfig("The sweep grid has no points.")
    return points


def winsorized_mean(values, fraction: float) -> float:
    """Return the mean after clipping `fraction` of the values in each tail."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return float("nan")
    if fraction == 0:
        return float(values.mean())
    return float(winsorize(values, limits=(fraction, fraction)).mean())


# ==== Monte Carlo ====
def monte_carlo(
    name: str,
    reps: int,
    base_seed: int,
    sweep: dict[str, list],
    *,
    skip: list[tuple[str, float]] | None = None,
    overrides: dict | None = None,
    winsorize_fraction: float | None = None,
    workers: int | None = None,
) -> list[SweepPoint]:
    """
    Repeat a scenario over every point of a parameter grid.

    Replicate i draws its noise from a seed derived from (base_seed, i),
    so results do not depend on the number of workers. Replicates that
    fail numerically are counted and left out of the summaries.
    """
    if reps < 1:
        raise InvalidConfig("At least one replicate is needed.")
    fraction = (
        lab_setting("WINSORIZE_FRACTION")
        if winsorize_fraction is None
        else winsorize_fraction
    )
    workers = workers or lab_setting("WORKERS")
    scenario = get_scenario(name)
    cap = {"max_iter": lab_setting("MAX_ITERATIONS")}
    base = apply_overrides(scenario.params, {**cap, **(overrides or {})})

    def replicate(params: dict) -> dict | None:
        try:
            return _replicate_metrics(scenario, params)
        except NumericalError as exc:
            logger.warning("Replicate with seed %d failed: %s", params["seed"], exc)
            return None

    results = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        for point in sweep_grid(sweep, skip):
            params = apply_overrides(base, point)
            runs = [
                {**params, "seed": replicate_seed(base_seed, index)}
                for index in range(reps)
            ]
            rows = list(executor.map(replicate, runs))
            succeeded = [row for row in rows if row is not None]
            results.append(
                SweepPoint(
                    params=point,
                    summaries=_summaries(succeeded, fraction),
                    replicates=reps,
                    failures=len(rows) - len(succeeded),
                )
            )
            logger.info(
                "Grid point %s: %d replicates, %d failed",
                point,
                reps,
                results[-1].failures,
            )
    return results
