# Core
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path

# Apps
from apps.lab.entities import CheckMode, Expectation, Method, ScenarioSpec

# Global
from common.exceptions import InvalidConfig, UnknownParameter, UnknownScenario
from common.numerics import lab_setting
from constants import REGISTRY_SCHEMA_VERSION


logger = logging.getLogger(__name__)

DEFAULT_REGISTRY = Path(__file__).resolve().parent.parent / "scenarios.toml"

# Scenario parameters and the types their overrides are parsed with.
PARAMETERS = {
    "length": int,
    "window": int,
    "omega1": float,
    "omega2": float,
    "amplitude1": float,
    "amplitude2": float,
    "phase1": float,
    "phase2": float,
    "sigma": float,
    "seed": int,
    "epsilon": float,
    "max_iter": int,
    "kappa": float,
    "gamma": float,
}

DEFAULTS = {
    "amplitude1": 1.0,
    "amplitude2": 1.0,
    "phase1": 0.0,
    "phase2": 0.0,
    "sigma": 0.0,
    "seed": 0,
    "epsilon": 1e-5,
    "max_iter": 200,
}

REQUIRED = ("length", "window", "omega1", "omega2")


# ==== Local ====
def _expectation(scenario: str, metric: str, entry: dict) -> Expectation:
    try:
        return Expectation(
            value=float(entry["value"]),
            mode=CheckMode(entry.get("mode", CheckMode.ABS)),
            tolerance=float(entry.get("tolerance", 0.0)),
        )
    except (KeyError, ValueError) as exc:
        raise InvalidConfig(
            f"Scenario {scenario!r} has an invalid expectation for {metric!r}."
        ) from exc


def _scenario(name: str, entry: dict) -> ScenarioSpec:
    params = dict(DEFAULTS)
    for key, raw in entry.get("params", {}).items():
        params[key] = parse_value(key, raw)
    missing = [key for key in REQUIRED if key not in params]
    if missing:
        raise InvalidConfig(f"Scenario {name!r} lacks {', '.join(missing)}.")

    try:
        method = Method(entry["method"])
        groups = entry["groups"]
    except (KeyError, ValueError) as exc:
        raise InvalidConfig(f"Scenario {name!r} needs a method and groups.") from exc

    return ScenarioSpec(
        name=name,
        description=entry.get("description", ""),
        method=method,
        groups=groups,
        params=params,
        partition=entry.get("partition"),
        blocks=entry.get("blocks"),
        expected={
            metric: _expectation(name, metric, value)
            for metric, value in entry.get("expected", {}).items()
        },
    )


# ==== Parameters ====
def parse_value(name: str, raw) -> int | float:
    """Convert a parameter value to the type of the parameter."""
    if name not in PARAMETERS:
        raise UnknownParameter(
            f"Unknown parameter {name!r}; expected one of {', '.join(PARAMETERS)}."
        )
    kind = PARAMETERS[name]
    try:
        value = kind(raw)
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(
            f"Parameter {name!r} needs a {kind.__name__}, got {raw!r}."
        ) from exc
    if kind is int and isinstance(raw, float) and not raw.is_integer():
        raise InvalidConfig(f"Parameter {name!r} needs an integer, got {raw!r}.")
    return value


def apply_overrides(params: dict, overrides: dict | None) -> dict:
    """Return scenario parameters with the overrides applied."""
    merged = dict(params)
    for name, raw in (overrides or {}).items():
        merged[name] = parse_value(name, raw)
    return merged


# ==== Registry ====
@lru_cache
def load_registry(path: Path | None = None) -> dict[str, ScenarioSpec]:
    """Read the versioned scenario registry."""
    path = Path(path or lab_setting("REGISTRY") or DEFAULT_REGISTRY)
    try:
        with open(path, mode="rb") as registry_file:
            content = tomllib.load(registry_file)
    except OSError as exc:
        raise InvalidConfig(f"Cannot read registry {path}: {exc.strerror}.") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig(f"Registry {path} is not valid TOML: {exc}.") from exc

    version = content.get("schema_version")
    if version != REGISTRY_SCHEMA_VERSION:
        raise InvalidConfig(
            f"Registry {path} has schema version {version}, "
            f"expected {REGISTRY_SCHEMA_VERSION}."
        )
    scenarios = {
        name: _scenario(name, entry)
        for name, entry in content.get("scenarios", {}).items()
    }
    logger.debug("Loaded %d scenarios from %s", len(scenarios), path)
    return scenarios


def get_scenario(name: str) -> ScenarioSpec:
    """Return a registered scenario by name."""
    scenarios = load_registry()
    if name not in scenarios:
        raise UnknownScenario(
            f"Unknown scenario {name!r}; known: {', '.join(sorted(scenarios))}."
        )
    return scenarios[name]
