"""Bound levels and energy bands of finite trains of sinusoidal wells."""

from .errors import (
    AmplitudeCollapseError,
    BoxError,
    ConfigError,
    EnergyRangeError,
    NoBoundTailError,
    NonMonotonicPhaseError,
    NumericalError,
    ResolutionError,
    SolverError,
    StepUnderflowError,
    TailDivergenceError,
)
from .floquet import Band, BandEdge, Classification, classify, find_band_edges
from .milne import AmplitudePhaseState, SolverSettings
from .oracle import FdGrid, default_grid, empirical_order, fd_spectrum
from .potential import DEFAULT_MASS, Potential
from .spectrum import Level, find_levels, total_phase, wavefunction

__all__ = [
    "AmplitudeCollapseError",
    "AmplitudePhaseState",
    "Band",
    "BandEdge",
    "BoxError",
    "Classification",
    "ConfigError",
    "DEFAULT_MASS",
    "EnergyRangeError",
    "FdGrid",
    "Level",
    "NoBoundTailError",
    "NonMonotonicPhaseError",
    "NumericalError",
    "Potential",
    "ResolutionError",
    "SolverError",
    "SolverSettings",
    "StepUnderflowError",
    "TailDivergenceError",
    "classify",
    "default_grid",
    "empirical_order",
    "fd_spectrum",
    "find_band_edges",
    "find_levels",
    "total_phase",
    "wavefunction",
]

__version__ = "0.1.0"
