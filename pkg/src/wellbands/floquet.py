"""Single-cell Floquet quantities and band-edge location.

One period cell of the infinite well train V = depth*sin^2(x) is
integrated from unit-amplitude, zero-slope, zero-phase initial data,
producing the cell amplitude u = A(pi) and cell phase gamma = p(pi).
Energy bands of the periodic problem are the intervals where
|u*cos(gamma)| < 1; their edges solve u*cos(gamma) = +/-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import milne
from .errors import ConfigError, ResolutionError
from .milne import SolverSettings

# Bisection width on edge energies.
_EDGE_TOL = 1e-10

DEFAULT_EDGE_SCAN_POINTS = 2000
IN_BAND = "in-band"
IN_GAP = "in-gap"
BELOW_ALL = "below-all"
ABOVE_ALL = "above-all"


@dataclass(frozen=True)
class BandEdge:
    """Energy where u*cos(gamma) meets +1 or -1 (the branch tag)."""

    energy: float
    branch: int
    well_depth: float


@dataclass(frozen=True)
class Band:
    """Interval between two consecutive edges hosting extended states."""

    lower: BandEdge
    upper: BandEdge

    def __post_init__(self) -> None:
        if not self.lower.energy < self.upper.energy:
            raise ConfigError(
                f"band edges out of order: {self.lower.energy} >= {self.upper.energy}"
            )

    def contains(self, energy: float) -> bool:
        return self.lower.energy <= energy <= self.upper.energy


@dataclass(frozen=True)
class Classification:
    """Where an energy sits relative to a sorted band list."""

    kind: str
    band_index: int | None = None


def cell_quantities(
    well_depth: float,
    energy: float,
    mass: float,
    settings: SolverSettings | None = None,
    x_start: float = 0.0,
) -> tuple[float, float]:
    """(u, gamma) after one cell [x_start, x_start + pi].

    By the pi-periodicity of sin^2 the result does not depend on which
    cell boundary x_start names.
    """
    if not mass > 0.0:
        raise ConfigError(f"mass must be positive, got {mass}")
    settings = settings or SolverSettings()
    y0 = np.array([1.0, 0.0, 0.0])
    v = lambda x: well_depth * math.sin(x) ** 2
    y = milne._advance(
        y0, x_start, x_start + math.pi, energy, v, 2.0 * mass, settings
    )
    return float(y[0]), float(y[2])


def _discriminant_batch(
    well_depth: float, energies: np.ndarray, mass: float, settings: SolverSettings
) -> np.ndarray:
    """u*cos(gamma) for a vector of energies in one batched sweep."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    y0 = np.zeros((3, energies.size))
    y0[0] = 1.0
    v = lambda x: well_depth * math.sin(x) ** 2
    y = milne._advance(y0, 0.0, math.pi, energies, v, 2.0 * mass, settings)
    return y[0] * np.cos(y[2])


def find_band_edges(
    well_depth: float,
    mass: float,
    e_min: float,
    e_max: float,
    settings: SolverSettings | None = None,
    scan_points: int = DEFAULT_EDGE_SCAN_POINTS,
) -> list[BandEdge]:
    """All edges of u*cos(gamma) = +/-1 in [e_min, e_max], ascending.

    A scan cell crossing both branches at once means two edges closer
    than the grid spacing, which the bisection could not tell apart.
    """
    if not e_min < e_max:
        raise ConfigError(f"need e_min < e_max, got ({e_min}, {e_max})")
    if scan_points < 2:
        raise ConfigError(f"scan_points must be >= 2, got {scan_points}")
    settings = settings or SolverSettings()
    energies = np.linspace(e_min, e_max, scan_points)
    disc = _discriminant_batch(well_depth, energies, mass, settings)

    brackets: list[tuple[int, float]] = []
    hit_cells: dict[int, int] = {}
    for branch in (1.0, -1.0):
        f = disc - branch
        crossing = np.nonzero(f[:-1] * f[1:] <= 0.0)[0]
        for cell in crossing:
            if f[cell] == 0.0 and f[cell + 1] == 0.0:
                continue
            hit_cells[int(cell)] = hit_cells.get(int(cell), 0) + 1
            brackets.append((int(cell), branch))
    if any(n > 1 for n in hit_cells.values()):
        raise ResolutionError(
            "two band edges fall within one scan cell; "
            f"increase scan_points (got {scan_points})"
        )
    if not brackets:
        return []

    cells = np.array([b[0] for b in brackets])
    targets = np.array([b[1] for b in brackets])
    e_lo = energies[cells].copy()
    e_hi = energies[cells + 1].copy()
    f_lo = disc[cells] - targets
    while float(np.max(e_hi - e_lo)) > _EDGE_TOL:
        mid = 0.5 * (e_lo + e_hi)
        f_mid = _discriminant_batch(well_depth, mid, mass, settings) - targets
        same = f_lo * f_mid > 0.0
        e_lo = np.where(same, mid, e_lo)
        f_lo = np.where(same, f_mid, f_lo)
        e_hi = np.where(same, e_hi, mid)

    edges = [
        BandEdge(energy=float(0.5 * (lo + hi)), branch=int(t), well_depth=well_depth)
        for lo, hi, t in zip(e_lo, e_hi, targets)
    ]
    edges.sort(key=lambda e: e.energy)
    return edges


def assemble_bands(
    edges: list[BandEdge], mass: float, settings: SolverSettings | None = None
) -> list[Band]:
    """Pair consecutive edges into bands where |u*cos(gamma)| < 1 between them.

    An unpaired trailing edge (its partner above the scanned range) is
    simply not part of any returned band.
    """
    settings = settings or SolverSettings()
    bands = []
    for lower, upper in zip(edges, edges[1:]):
        if lower.well_depth != upper.well_depth:
            raise ConfigError("edges from different well depths cannot form a band")
        mid = 0.5 * (lower.energy + upper.energy)
        u, gamma = cell_quantities(lower.well_depth, mid, mass, settings)
        if abs(u * math.cos(gamma)) < 1.0:
            bands.append(Band(lower, upper))
    return bands


def ground_band(
    well_depth: float,
    mass: float,
    settings: SolverSettings | None = None,
    scan_points: int = DEFAULT_EDGE_SCAN_POINTS,
) -> Band | None:
    """Lowest band of the periodic continuation, or None if no complete
    band exists below zero (e.g. well_depth >= 0)."""
    if well_depth >= 0.0:
        return None
    settings = settings or SolverSettings()
    edges = find_band_edges(
        well_depth, mass, well_depth + 1e-6, -1e-6, settings, scan_points
    )
    bands = assemble_bands(edges, mass, settings)
    return bands[0] if bands else None


def classify(energy: float, bands: list[Band]) -> Classification:
    """Locate an energy against sorted, non-overlapping bands.

    Band intervals are closed, so an edge energy counts as in-band.
    """
    spans = [(b.lower.energy, b.upper.energy) for b in bands]
    deduped = []
    for span in spans:
        if deduped and span == deduped[-1]:
            continue
        if deduped and span[0] < deduped[-1][1]:
            raise ConfigError("bands must be sorted and non-overlapping")
        deduped.append(span)
    if not deduped:
        return Classification(ABOVE_ALL)
    if energy < deduped[0][0]:
        return Classification(BELOW_ALL)
    if energy > deduped[-1][1]:
        return Classification(ABOVE_ALL)
    for i, (lo, hi) in enumerate(deduped):
        if lo <= energy <= hi:
            return Classification(IN_BAND, band_index=i)
    return Classification(IN_GAP)
