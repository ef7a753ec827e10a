from rest_framework.exceptions import ValidationError as DRFValidationError

from common.exceptions import InputError, NumericalError
from constants import EXIT_NUMERICAL, EXIT_USAGE


def _flatten(detail, prefix: str = "") -> list[str]:
    """Flatten nested DRF error details into `field: message` lines."""
    if isinstance(detail, dict):
        return [
            line
            for field, value in detail.items()
            for line in _flatten(value, f"{prefix}{field}: ")
        ]
    if isinstance(detail, list):
        return [line for value in detail for line in _flatten(value, prefix)]
    return [f"{prefix}{detail}"]


def error_payload(exc: Exception) -> dict:
    """
    Return a standard error payload.

    Every error is reported as a JSON-ready object with the single
    key `errors` holding the error `code` and a human `detail`.
    """
    if isinstance(exc, DRFValidationError):
        return {"errors": {"code": "InvalidConfig", "detail": _flatten(exc.detail)}}
    if isinstance(exc, InputError):
        return {"errors": {"code": exc.code, "detail": exc.messages}}
    if isinstance(exc, NumericalError):
        return {"errors": {"code": exc.code, "detail": exc.message}}
    return {"errors": {"code": type(exc).__name__, "detail": str(exc)}}


def exit_code_for(exc: Exception) -> int:
    """Return the process exit code for a domain error."""
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_USAGE


def describe(exc: Exception) -> str:
    """Return a one-line description naming the error code."""
    if isinstance(exc, DRFValidationError):
        return f"InvalidConfig: {'; '.join(_flatten(exc.detail))}"
    return str(exc)
