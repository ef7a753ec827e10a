# Core
import csv
from pathlib import Path

# Apps
from apps.diagnostics.entities import CorrelationMatrix
from apps.lab.entities import PipelineOutcome, SweepPoint

# Global
from common.functions import format_float
from common.renderers import ArtifactJSONRenderer
from constants import COMPONENT_LABEL, RESIDUAL_LABEL


# ==== Local ====
def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value)
    return str(value)


# ==== Series artifacts ====
def write_components(*, path: str | Path, outcome: PipelineOutcome) -> None:
    """Write one column per output component, then the residual."""
    header = [
        COMPONENT_LABEL.format(index=index)
        for index in range(1, len(outcome.components) + 1)
    ]
    columns = [c.values for c in outcome.components] + [outcome.residual.values]
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow([*header, RESIDUAL_LABEL])
        for row in zip(*columns):
            writer.writerow([format_float(value) for value in row])


def write_correlation(*, path: str | Path, matrix: CorrelationMatrix) -> None:
    """Write a correlation matrix with header and index labels."""
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow(["", *matrix.labels])
        for label, *row in matrix.as_rows():
            writer.writerow([label, *(format_float(value) for value in row)])


# ==== JSON ====
def render_json(data) -> bytes:
    return ArtifactJSONRenderer().render(data, renderer_context={"indent": 2})


def write_json(*, path: str | Path, data) -> None:
    Path(path).write_bytes(render_json(data) + b"\n")


# ==== Sweeps ====
def sweep_rows(points: list[SweepPoint]) -> tuple[list[str], list[list[str]]]:
    """
    Flatten sweep results into a header and one row per grid point.

    Every metric gets its winsorized mean; squared-error metrics also
    get the matching RMSE column.
    """
    names = list(dict.fromkeys(name for point in points for name in point.params))
    metrics = sorted({metric for point in points for metric in point.summaries})
    header = [*names, "replicates", "failures"]
    for metric in metrics:
        header.append(f"mean_{metric}")
        if metric.startswith("sq_error_"):
            header.append(f"rmse_{metric.removeprefix('sq_error_')}")

    rows = []
    for point in points:
        row = [_cell(point.params.get(name)) for name in names]
        row += [_cell(point.replicates), _cell(point.failures)]
        for metric in metrics:
            summary = point.summaries.get(metric)
            row.append(_cell(summary and summary.winsorized_mean))
            if metric.startswith("sq_error_"):
                row.append(_cell(summary and point.rmse(metric)))
        rows.append(row)
    return header, rows


def write_sweep(*, file, points: list[SweepPoint]) -> None:
    header, rows = sweep_rows(points)
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
