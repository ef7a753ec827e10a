# Libs
import numpy as np
from django.conf import settings

# Global
from common.exceptions import ShapeMismatch


_NUMERICS_DEFAULTS = {
    "RANK_TOLERANCE": 1e-11,
    "CONSISTENCY_THRESHOLD": 1e-8,
    "CONSISTENCY_POLICY": "warn",
}

_LAB_DEFAULTS = {
    "BIT_GENERATOR": "PCG64",
    "WINSORIZE_FRACTION": 0.05,
    "MAX_ITERATIONS": 200,
    "WORKERS": 1,
    "REGISTRY": None,
}


def _section(name: str, defaults: dict) -> dict:
    """Merge a settings section over its defaults."""
    values = dict(defaults)
    if settings.configured:
        values.update(getattr(settings, name, {}))
    return values


def numerics_setting(key: str):
    """Return a `NUMERICS` setting, falling back to the default."""
    return _section("NUMERICS", _NUMERICS_DEFAULTS)[key]


def lab_setting(key: str):
    """Return a `LAB` setting, falling back to the default."""
    return _section("LAB", _LAB_DEFAULTS)[key]


def rank_tolerance(shape: tuple[int, ...]) -> float:
    """Return the relative tolerance for rank decisions on a matrix shape."""
    return numerics_setting("RANK_TOLERANCE") * max(shape)


def numerical_rank(singular_values: np.ndarray, rel_tol: float) -> int:
    """Count singular values above `rel_tol` times the largest one."""
    if singular_values.size == 0:
        return 0
    top = singular_values[0]
    if top <= 0:
        return 0
    return int(np.count_nonzero(singular_values > rel_tol * top))


def as_matrix(value) -> np.ndarray:
    """Return a 2-D float array for a matrix-like value."""
    matrix = getattr(value, "entries", value)
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ShapeMismatch(f"Expected a matrix, got {matrix.ndim} dimensions.")
    return matrix
