# Core
from pathlib import Path

# Apps
from apps.cli.serializers.report import (
    ScenarioInfoSerializer,
    ScenarioReportSerializer,
)
from apps.cli.services.artifacts import write_json
from apps.lab.entities import ScenarioResult
from apps.lab.services.montecarlo import parse_assignment
from apps.lab.services.registry import load_registry

# Global
from constants import SCHEMA_VERSION


REPORT_FILE = "report.json"


def parse_overrides(assignments: list[str] | None) -> dict[str, str]:
    """Collect `name=value` assignments; later ones win."""
    return dict(parse_assignment(item) for item in assignments or [])


def registry_listing() -> list[dict]:
    scenarios = load_registry()
    return ScenarioInfoSerializer(
        [scenarios[name] for name in sorted(scenarios)], many=True
    ).data


def report_payload(result: ScenarioResult) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "scenario": result.scenario,
        "params": result.params,
        "metrics": result.metrics,
        "checks": result.checks,
        "passed": result.passed,
    }
    return ScenarioReportSerializer(report).data


def write_report(*, output: str | Path, result: ScenarioResult) -> Path:
    output = Path(output)
    output.mkdir(parents=True, exist_ok=True)
    path = output / REPORT_FILE
    write_json(path=path, data=report_payload(result))
    return path
