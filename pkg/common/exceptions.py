from django.core.exceptions import ValidationError


class InputError(ValidationError):
    """
    Base error for invalid arguments and configuration.

    The error `code` is the class name so callers and reports can
    name the failed check (e.g. `WindowOutOfRange`).
    """

    def __init__(self, message: str, *, params: dict | None = None):
        super().__init__(message, code=type(self).__name__, params=params)

    def __str__(self) -> str:
        return f"{self.code}: {'; '.join(self.messages)}"


class WindowOutOfRange(InputError):
    """Window length outside 1 < L < N."""


class SeriesTooShort(InputError):
    """Series has fewer samples than the operation needs."""


class NonFiniteSeries(InputError):
    """Series contains NaN or infinite values."""


class ShapeMismatch(InputError):
    """Operands do not have compatible shapes."""


class TooFewColumns(InputError):
    """Matrix has fewer than two columns."""


class IndexOutOfRange(InputError):
    """Component index outside 1..d."""


class OverlappingGroups(InputError):
    """Groups of a grouping share an index."""


class InvalidPartition(InputError):
    """Grouping does not partition the component indices."""


class NonPositiveScale(InputError):
    """Rescaling factor is not strictly positive."""


class InvalidGroupSpec(InputError):
    """Group specification string cannot be parsed."""


class UnknownScenario(InputError):
    """Scenario name is not in the registry."""


class UnknownParameter(InputError):
    """Override names a parameter the scenario does not have."""


class InvalidConfig(InputError):
    """Pipeline configuration failed validation."""


class NumericalError(Exception):
    """Base error for failures of the numerical algorithms."""

    def __init__(self, message: str):
        super().__init__(message)
        self.code = type(self).__name__
        self.message = message

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class NotSymmetric(NumericalError):
    """Metric matrix is not symmetric."""


class NegativeEigenvalue(NumericalError):
    """Metric matrix has a significantly negative eigenvalue."""


class RankDeficientBasis(NumericalError):
    """Basis vectors are linearly dependent."""


class RankDeficientStack(NumericalError):
    """Stacked group bases are not of full column rank."""


class InconsistentMetric(NumericalError):
    """Metric column spaces do not contain the matrix spaces."""


class ZeroNorm(NumericalError):
    """Normalization by a zero norm."""
