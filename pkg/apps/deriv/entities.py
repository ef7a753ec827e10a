# Core
from dataclasses import dataclass

# Apps
from apps.decomposition.entities import Grouping

# Global
from common.exceptions import InvalidConfig


@dataclass(frozen=True)
class DerivConfig:
    """Derivative weight γ and the partition of the refined components."""

    gamma: float
    partition: Grouping

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidConfig("The derivative weight gamma must be positive.")
