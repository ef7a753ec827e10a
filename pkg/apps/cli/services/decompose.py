# Core
import logging
from pathlib import Path

# Libs
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser

# Apps
from apps.cli.serializers.pipeline import PipelineConfigSerializer
from apps.cli.serializers.report import SummaryInfoSerializer
from apps.cli.services.artifacts import (
    write_components,
    write_correlation,
    write_json,
)
from apps.decomposition.entities import Grouping
from apps.lab.entities import (
    Method,
    PipelineDiagnostics,
    PipelineOutcome,
    PipelineSpec,
)
from apps.lab.services.pipeline import pipeline_diagnostics, run_pipeline
from apps.series.services.csv_io import read_series

# Global
from common.errors import error_payload
from common.exceptions import InvalidConfig, NumericalError
from constants import SCHEMA_VERSION


logger = logging.getLogger(__name__)

COMPONENTS_FILE = "components.csv"
WCOR_FILE = "wcor.csv"
SUMMARY_FILE = "summary.json"


# ==== Local ====
def _matrix(matrix) -> list | None:
    return None if matrix is None else matrix.values.tolist()


# ==== Services ====
def load_config(path: str | Path | None) -> dict:
    """Read a JSON pipeline configuration; no path means no options."""
    if not path:
        return {}
    try:
        with open(path, mode="rb") as config_file:
            content = JSONParser().parse(config_file)
    except (OSError, ParseError) as exc:
        raise InvalidConfig(f"Cannot read the configuration {path}: {exc}") from exc
    if not isinstance(content, dict):
        raise InvalidConfig(f"The configuration {path} must hold a JSON object.")
    return content


def merge_options(config: dict, flags: dict) -> dict:
    """Lay the flags that were given over the file configuration."""
    return {**config, **{k: v for k, v in flags.items() if v is not None}}


def validate_options(options: dict) -> dict:
    serializer = PipelineConfigSerializer(data=options)
    serializer.check_data()
    return serializer.validated_data


def build_spec(data: dict) -> PipelineSpec:
    partition = data.get("partition")
    return PipelineSpec(
        window=data["window"],
        method=Method(data["method"]),
        groups=Grouping.parse(data["groups"]),
        partition=Grouping.parse(partition) if partition else None,
        epsilon=data["epsilon"],
        max_iter=data["max_iter"],
        kappa=data.get("kappa"),
        gamma=data.get("gamma"),
    )


def summary_payload(*, data: dict, diagnostics: PipelineDiagnostics) -> dict:
    params = {
        key: data.get(key)
        for key in (
            "window",
            "groups",
            "partition",
            "epsilon",
            "max_iter",
            "kappa",
            "gamma",
        )
    }
    summary = {
        "schema_version": SCHEMA_VERSION,
        "method": data["method"],
        "params": params,
        "diagnostics": {
            "wcor_before": _matrix(diagnostics.wcor_before),
            "wcor_after": _matrix(diagnostics.wcor_after),
            "lr_wcor": _matrix(diagnostics.lr_wcor),
            "tau_before": diagnostics.tau_before,
            "tau": diagnostics.tau_after,
            "iterations": diagnostics.iterations,
            "converged": diagnostics.converged,
            "history": diagnostics.history,
            "frequencies": diagnostics.frequencies,
        },
    }
    return SummaryInfoSerializer(summary).data


def decompose(
    options: dict,
) -> tuple[PipelineOutcome, PipelineDiagnostics, Path]:
    """
    Run a configured pipeline on a CSV series and write its artifacts.

    Writes components.csv, wcor.csv and summary.json to the output
    directory. A numerical failure leaves its error payload in
    summary.json before it propagates.
    """
    data = validate_options(options)
    spec = build_spec(data)
    series = read_series(data["input"])
    output = Path(data["output"])
    output.mkdir(parents=True, exist_ok=True)

    try:
        outcome = run_pipeline(series, spec)
        diagnostics = pipeline_diagnostics(outcome, frequencies=data["frequencies"])
    except NumericalError as exc:
        write_json(path=output / SUMMARY_FILE, data=error_payload(exc))
        logger.warning("Decomposition failed: %s", exc)
        raise

    write_components(path=output / COMPONENTS_FILE, outcome=outcome)
    write_correlation(path=output / WCOR_FILE, matrix=diagnostics.wcor_after)
    summary = summary_payload(data=data, diagnostics=diagnostics)
    write_json(path=output / SUMMARY_FILE, data=summary)
    logger.info("Wrote %d components to %s", len(outcome.components), output)
    return outcome, diagnostics, output
