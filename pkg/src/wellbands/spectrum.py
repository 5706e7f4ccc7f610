"""Bound-state search through the central-start double integration.

Both integrations launch from the junction x = N*pi/2 with A=1, A'=0,
p=0. Marching leftward through the v1 wells gives, together with the
exact free-tail phase beyond x=0, the boundary phase alpha; marching
rightward gives beta. Bound states sit where the total phase
Phi(E) = alpha + beta crosses an integer multiple of pi,
Phi = (j+1)*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import milne
from .errors import (
    ConfigError,
    EnergyRangeError,
    NonMonotonicPhaseError,
    NumericalError,
    ResolutionError,
)
from .milne import SolverSettings
from .potential import Potential

# Margin keeping the scan strictly inside the open interval (min(v1,v2), 0).
SCAN_MARGIN = 1e-6
# Residual every returned level must satisfy: |Phi - (j+1)pi| below this.
PHASE_RESIDUAL_TOL = 1e-8
# Final width of the energy bracket around each crossing.
_BISECT_TOL = 1e-12
# Interior points per bracket and per refinement pass; each pass
# shrinks every bracket by this factor plus one, so five passes take a
# scan-cell-sized bracket below _BISECT_TOL.
_REFINE_POINTS = 80
# Exterior samples farther out than this many decay lengths are flushed
# to zero before cosh overflow can produce inf*0.
_TAIL_EXTENT_LIMIT = 300.0
# The bracketing scan only needs the crossing cell, not ten digits, and
# in spectral gaps the amplitude grows fast enough that full tolerance
# would shrink the common batch step to a crawl. The bracket refinement
# and the final residual check still run at the caller's tolerance.
_SCAN_TOL_FLOOR = 1e-6

DEFAULT_SCAN_POINTS = 400


@dataclass(frozen=True)
class Level:
    """A converged bound state."""

    index_j: int
    energy: float
    alpha: float
    beta: float


def _phase_batch(energies: np.ndarray, pot: Potential, settings: SolverSettings):
    """Phi, alpha, beta for a vector of negative energies in one sweep."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    k_cols = energies.size
    two_m = 2.0 * pot.mass
    center = pot.junction

    def start() -> np.ndarray:
        y = np.zeros((3, k_cols))
        y[0] = 1.0
        return y

    v1, v2 = pot.v1, pot.v2
    left_v = lambda x: v1 * math.sin(x) ** 2
    right_v = lambda x: v2 * math.sin(x) ** 2

    yl = milne._advance(start(), center, 0.0, energies, left_v, two_m, settings)
    alpha = -yl[2] + milne._free_tail_phase(yl, -1, energies, two_m)

    yr = milne._advance(
        start(), center, pot.support_end, energies, right_v, two_m, settings
    )
    beta = yr[2] + milne._free_tail_phase(yr, 1, energies, two_m)
    return alpha + beta, alpha, beta


def total_phase(
    energy: float, pot: Potential, settings: SolverSettings | None = None
) -> tuple[float, float, float]:
    """Total boundary phase Phi(E) = alpha + beta with its two parts."""
    v_min = min(pot.v1, pot.v2)
    if not (v_min < energy < 0.0):
        raise EnergyRangeError(
            f"energy must lie in ({v_min}, 0), got {energy}"
        )
    settings = settings or SolverSettings()
    phi, alpha, beta = _phase_batch(np.array([energy]), pot, settings)
    return float(phi[0]), float(alpha[0]), float(beta[0])


def _refine_brackets(targets, e_lo, e_hi, pot, settings):
    """Shrink [e_lo, e_hi] around each phase target by repeated batched
    subdivision. One solver sweep per pass covers every bracket."""
    offsets = np.arange(1, _REFINE_POINTS + 1) / (_REFINE_POINTS + 1)
    rows = np.arange(e_lo.size)
    while float(np.max(e_hi - e_lo)) > _BISECT_TOL:
        grid = e_lo[:, None] + (e_hi - e_lo)[:, None] * offsets
        phi, _, _ = _phase_batch(grid.reshape(-1), pot, settings)
        below = (phi.reshape(grid.shape) < targets[:, None]).sum(axis=1)
        inner_lo = grid[rows, np.clip(below - 1, 0, _REFINE_POINTS - 1)]
        inner_hi = grid[rows, np.clip(below, 0, _REFINE_POINTS - 1)]
        e_lo = np.where(below > 0, inner_lo, e_lo)
        e_hi = np.where(below < _REFINE_POINTS, inner_hi, e_hi)
    return e_lo, e_hi


def find_levels(
    pot: Potential,
    settings: SolverSettings | None = None,
    scan_points: int = DEFAULT_SCAN_POINTS,
) -> list[Level]:
    """All bound states, ascending in energy, j assigned from 0 upward.

    Scans Phi(E) over (min(v1,v2)+eps, -eps), brackets every crossing
    of an integer multiple of pi and refines each bracket down to an
    energy width of 1e-12.
    """
    if scan_points < 50:
        raise ConfigError(f"scan_points must be >= 50, got {scan_points}")
    settings = settings or SolverSettings()
    v_min = min(pot.v1, pot.v2)
    lo, hi = v_min + SCAN_MARGIN, -SCAN_MARGIN
    if lo >= hi:
        return []

    energies = np.linspace(lo, hi, scan_points)
    scan_settings = replace(
        settings,
        rel_tol=max(settings.rel_tol, _SCAN_TOL_FLOOR),
        abs_tol=max(settings.abs_tol, _SCAN_TOL_FLOOR),
    )
    phi, _, _ = _phase_batch(energies, pot, scan_settings)
    if not (np.diff(phi) > 0.0).all():
        raise NonMonotonicPhaseError(
            "total phase is not strictly increasing across the scan grid; "
            "results would be unreliable"
        )

    multiples = np.floor(phi / math.pi).astype(int)
    steps = np.diff(multiples)
    if (steps > 1).any():
        raise ResolutionError(
            "more than one quantization crossing per scan cell; "
            f"increase scan_points (got {scan_points})"
        )
    cells = np.nonzero(steps == 1)[0]
    if cells.size == 0:
        return []

    targets = (multiples[cells] + 1).astype(float) * math.pi
    e_lo, e_hi = _refine_brackets(
        targets, energies[cells].copy(), energies[cells + 1].copy(), pot, settings
    )

    roots = 0.5 * (e_lo + e_hi)
    phi_r, alpha_r, beta_r = _phase_batch(roots, pot, settings)

    levels = []
    for i, e_root in enumerate(roots):
        k_mult = int(round(targets[i] / math.pi))
        residual = abs(float(phi_r[i]) - targets[i])
        if residual >= PHASE_RESIDUAL_TOL:
            raise NumericalError(
                f"quantization residual {residual:.3e} at E={e_root:.12g} "
                f"exceeds {PHASE_RESIDUAL_TOL}"
            )
        levels.append(
            Level(
                index_j=k_mult - 1,
                energy=float(e_root),
                alpha=float(alpha_r[i]),
                beta=float(beta_r[i]),
            )
        )
    return levels


def wavefunction(
    level: Level,
    pot: Potential,
    settings: SolverSettings | None = None,
    grid: Iterable[float] = (),
) -> list[tuple[float, float]]:
    """Samples of F(x) = A(x)*sin(p(x) + alpha) on the given coordinates.

    Interior points use the marched phase directly. Exterior points use
    the closed-form free-tail amplitude and phase measured from the
    support edge, written so the decaying combination is formed before
    the exponentially growing amplitude can multiply the quantization
    residual.
    """
    settings = settings or SolverSettings()
    xs = np.asarray(list(grid), dtype=float)
    if xs.size == 0:
        return []
    order = np.argsort(xs)
    sorted_x = xs[order]

    center = pot.junction
    two_m = 2.0 * pot.mass
    energy = level.energy
    alpha = level.alpha

    inside = (sorted_x >= 0.0) & (sorted_x <= pot.support_end)
    states = np.empty((3, xs.size))
    left_chain = [
        i for i in range(xs.size) if inside[i] and sorted_x[i] <= center
    ][::-1]
    right_chain = [
        i for i in range(xs.size) if inside[i] and sorted_x[i] > center
    ]

    edge_states = {}
    for chain, stop, side in ((left_chain, 0.0, -1), (right_chain, pot.support_end, 1)):
        y = np.array([1.0, 0.0, 0.0])
        x_at = center
        for i in chain:
            y = milne._advance(
                y, x_at, sorted_x[i], energy, pot.evaluate, two_m, settings
            )
            x_at = sorted_x[i]
            states[:, i] = y
        edge_states[side] = milne._advance(
            y, x_at, stop, energy, pot.evaluate, two_m, settings
        )

    values = np.empty(xs.size)
    values[inside] = states[0, inside] * np.sin(states[2, inside] + alpha)

    kappa = math.sqrt(-two_m * energy)
    sign = -1.0 if level.index_j % 2 else 1.0
    for side, mask, origin, factor in (
        (-1, sorted_x < 0.0, 0.0, 1.0),
        (1, sorted_x > pot.support_end, pot.support_end, sign),
    ):
        if not mask.any():
            continue
        u = side * (sorted_x[mask] - origin)
        u_safe = np.minimum(u, _TAIL_EXTENT_LIMIT / kappa)
        amp, q, total = milne._free_tail_profile(
            edge_states[side], side, u_safe, energy, two_m
        )
        f = factor * amp * np.sin(total - q)
        values[mask] = np.where(u > u_safe, 0.0, f)

    out = np.empty(xs.size)
    out[order] = values
    return [(float(x), float(f)) for x, f in zip(xs, out)]
