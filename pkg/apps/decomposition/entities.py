# Core
from dataclasses import dataclass, field

# Libs
import numpy as np
from numpy.typing import NDArray

# Apps
from apps.oblique.entities import MatrixDecomposition
from apps.series.entities import TimeSeries

# Global
from common.exceptions import (
    IndexOutOfRange,
    InvalidGroupSpec,
    InvalidPartition,
    OverlappingGroups,
)
from common.functions import clean_spaces, parse_index_ranges


@dataclass(frozen=True)
class Grouping:
    """
    Disjoint groups of 1-based component indices.

    The union of the groups may leave components out; those go to the
    residual of a decomposition.
    """

    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in group) for group in self.groups)
        seen = set()
        for group in groups:
            if not group:
                raise InvalidGroupSpec("Groups must not be empty.")
            if min(group) < 1:
                raise IndexOutOfRange("Component indices start at 1.")
            overlap = seen.intersection(group) or len(set(group)) < len(group)
            if overlap:
                raise OverlappingGroups(f"Group {group} repeats an index.")
            seen.update(group)
        object.__setattr__(self, "groups", groups)

    @classmethod
    def parse(cls, spec: str) -> "Grouping":
        """Parse `"1-4,7-11;5,6,12,13"`: `;` separates groups."""
        spec = clean_spaces(spec).strip(";")
        if not spec:
            raise InvalidGroupSpec("Empty group specification.")
        return cls(tuple(tuple(parse_index_ranges(part)) for part in spec.split(";")))

    @classmethod
    def elementary(cls, count: int) -> "Grouping":
        """Return the singleton groups {1}, …, {count}."""
        return cls(tuple((i,) for i in range(1, count + 1)))

    @classmethod
    def leading(cls, first: int, total: int) -> "Grouping":
        """Return {1..first}, {first+1..total}."""
        if not 0 < first < total:
            raise InvalidPartition(f"Cannot split {total} components after {first}.")
        return cls((tuple(range(1, first + 1)), tuple(range(first + 1, total + 1))))

    def __len__(self) -> int:
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def __str__(self) -> str:
        return ";".join(",".join(map(str, group)) for group in self.groups)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(i for group in self.groups for i in group))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(group) for group in self.groups)

    def zero_based(self) -> list[list[int]]:
        return [[i - 1 for i in group] for group in self.groups]

    def check_range(self, count: int) -> None:
        """Check that every index lies within 1..count."""
        top = max(self.indices, default=0)
        if top > count:
            raise IndexOutOfRange(
                f"Component {top} requested but only {count} are available."
            )

    def check_partition(self, count: int) -> None:
        """Check that the groups partition 1..count."""
        if self.indices != tuple(range(1, count + 1)):
            raise InvalidPartition(
                f"Groups {self} do not partition the indices 1..{count}."
            )


@dataclass(frozen=True, eq=False)
class SSAResult:
    """A grouped decomposition of a series together with its residual."""

    series: TimeSeries
    window: int
    decomposition: MatrixDecomposition
    grouping: Grouping
    grouped_matrices: list[NDArray[np.float64]]
    components: list[TimeSeries]
    residual: TimeSeries
    residual_matrix: NDArray[np.float64] = field(repr=False)
