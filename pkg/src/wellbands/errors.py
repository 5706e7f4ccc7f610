"""Solver exception hierarchy.

Every error belongs to one of three categories that the command-line
front end maps onto exit codes: config -> 1, numerical -> 2,
resolution -> 3.
"""

from __future__ import annotations


class SolverError(Exception):
    """Base class for all solver failures."""

    category = "numerical"


class ConfigError(SolverError):
    """Invalid parameters, settings, or request payloads."""

    category = "config"


class NumericalError(SolverError):
    """Integration or root-finding broke down."""

    category = "numerical"


class ResolutionError(SolverError):
    """A scan grid was too coarse to separate neighbouring roots."""

    category = "resolution"


class AmplitudeCollapseError(NumericalError):
    """Amplitude A(x) left the positive domain."""


class StepUnderflowError(NumericalError):
    """Adaptive controller shrank the step below float resolution."""


class TailDivergenceError(NumericalError):
    """Exterior tail phase failed to converge within the extent cap."""


class NoBoundTailError(ConfigError):
    """Tail integration requested at E >= 0, where no bound tail exists."""


class EnergyRangeError(ConfigError):
    """Energy outside the open interval (min(v1, v2), 0)."""


class NonMonotonicPhaseError(NumericalError):
    """Phase moved against the integration direction, or the total
    phase failed to increase along the energy scan."""


class BoxError(NumericalError):
    """Finite-difference box too small: the lowest eigenfunction has not
    decayed at the boundary."""
