# Global
from common.exceptions import InvalidGroupSpec
from constants import FLOAT_DIGITS


def clean_spaces(content: str) -> str:
    """Remove spaces from a string."""
    return "".join(content.split())


def is_number(token: str) -> bool:
    """Check whether a token parses as a real number."""
    try:
        float(token)
    except ValueError:
        return False
    return True


def format_float(value: float) -> str:
    """Format a float with the artifact precision."""
    return f"{value:.{FLOAT_DIGITS}g}"


def parse_index_ranges(content: str) -> list[int]:
    """
    Parse a comma-separated list of 1-based indices and ranges.

    `"1-3,7"` becomes `[1, 2, 3, 7]`; order of appearance is kept.
    """
    indices = []
    for token in clean_spaces(content).split(","):
        if not token:
            raise InvalidGroupSpec(f"Empty index in '{content}'.")
        start, sep, stop = token.partition("-")
        try:
            first = int(start)
            last = int(stop) if sep else first
        except ValueError:
            raise InvalidGroupSpec(f"Invalid index token '{token}'.")
        if first < 1 or last < first:
            raise InvalidGroupSpec(f"Invalid index range '{token}'.")
        indices.extend(range(first, last + 1))
    return indices
