# Apps
from apps.lab.services.montecarlo import parse_assignment, parse_sweep
from apps.lab.services.registry import parse_value

# Global
from common.exceptions import InvalidConfig


def parse_grid(sweeps: list[str] | None) -> dict[str, list]:
    """Parse repeated `--sweep` arguments into a parameter grid."""
    grid = {}
    for item in sweeps or []:
        name, values = parse_sweep(item)
        if name in grid:
            raise InvalidConfig(f"Parameter {name!r} is swept twice.")
        grid[name] = values
    return grid


def parse_skips(
    skips: list[str] | None, *, params: dict
) -> list[tuple[str, float]]:
    """
    Parse `--skip name=value` arguments into grid points to drop.

    The value may name a scenario parameter instead of a number, so
    `omega1=omega2` drops the point where both frequencies coincide.
    """
    pairs = []
    for item in skips or []:
        name, value = parse_assignment(item)
        if value in params:
            pairs.append((name, float(params[value])))
        else:
            pairs.append((name, float(parse_value(name, value))))
    return pairs
