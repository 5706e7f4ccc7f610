"""Two-segment equiperiodic multi-well potential.

V(x) = v1*sin^2(x) on [0, N*pi/2], v2*sin^2(x) on [N*pi/2, N*pi] and
exactly zero outside. N is an even cell count, so each segment holds
N/2 full period-pi wells and the junction falls on a node of sin^2,
making the profile continuous everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Effective mass of the wave equation F'' + 2m(E - V)F = 0. The default
# of 2 is the value the solver's validated band-edge and level data
# correspond to; override per Potential for other systems.
DEFAULT_MASS = 2.0

EXTERIOR_LEFT = "exterior-left"
LEFT_WELLS = "left-wells"
RIGHT_WELLS = "right-wells"
EXTERIOR_RIGHT = "exterior-right"


@dataclass(frozen=True)
class Potential:
    """Immutable well configuration (v1, v2, n_cells, mass)."""

    v1: float
    v2: float
    n_cells: int
    mass: float = DEFAULT_MASS

    def __post_init__(self) -> None:
        if self.n_cells < 2 or self.n_cells % 2 != 0:
            raise ConfigError(
                f"n_cells must be an even integer >= 2, got {self.n_cells}"
            )
        if not self.mass > 0.0:
            raise ConfigError(f"mass must be positive, got {self.mass}")

    @property
    def junction(self) -> float:
        """Segment boundary N*pi/2 where the two well depths meet."""
        return 0.5 * self.n_cells * math.pi

    @property
    def support_end(self) -> float:
        """Right end N*pi of the support; V vanishes beyond it."""
        return self.n_cells * math.pi

    def evaluate(self, x: float) -> float:
        """Potential value at a single coordinate."""
        if x < 0.0 or x > self.support_end:
            return 0.0
        v = self.v1 if x < self.junction else self.v2
        s = math.sin(x)
        return v * s * s

    def evaluate_many(self, x: np.ndarray) -> np.ndarray:
        """Vectorized evaluate for grid assembly."""
        x = np.asarray(x, dtype=float)
        depth = np.where(x < self.junction, self.v1, self.v2)
        inside = (x >= 0.0) & (x <= self.support_end)
        return np.where(inside, depth * np.sin(x) ** 2, 0.0)

    def segment_of(self, x: float) -> str:
        """Classify x against 0, N*pi/2 and N*pi.

        Boundary points belong to the segment on their right, except
        x = N*pi which closes the right wells.
        """
        if x < 0.0:
            return EXTERIOR_LEFT
        if x < self.junction:
            return LEFT_WELLS
        if x <= self.support_end:
            return RIGHT_WELLS
        return EXTERIOR_RIGHT
