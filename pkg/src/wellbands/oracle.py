"""Independent finite-difference check on the phase-integration spectrum.

A three-point discretisation of -F''/(2m) + V F on a hard-walled box
gives a symmetric tridiagonal matrix whose negative eigenvalues shadow
the bound levels. Eigenvalues are located by Sturm bisection, so no
linear-algebra package is needed and the count below any threshold is
exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoxError, ConfigError
from .potential import Potential

_EIG_TOL = 1e-10
# Lowest-eigenvalue drift allowed when the box is widened.
_BOX_SHIFT_TOL = 1e-6
_BOX_EXTENSION = 4.0

DEFAULT_FD_POINTS = 8000
DEFAULT_FD_PADDING = 12.0


@dataclass(frozen=True)
class FdGrid:
    """Dirichlet box (x_left, x_right) with n_points interior nodes."""

    x_left: float
    x_right: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.x_left < self.x_right:
            raise ConfigError(
                f"need x_left < x_right, got ({self.x_left}, {self.x_right})"
            )
        if self.n_points < 3:
            raise ConfigError(f"n_points must be >= 3, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_left + self.h * np.arange(1, self.n_points + 1)


def default_grid(
    pot: Potential,
    n_points: int = DEFAULT_FD_POINTS,
    padding: float = DEFAULT_FD_PADDING,
) -> FdGrid:
    """Box covering the wells plus `padding` of free region on each side."""
    if padding <= 0.0:
        raise ConfigError(f"padding must be positive, got {padding}")
    return FdGrid(-padding, pot.support_end + padding, n_points)


def _count_below(
    diag: np.ndarray, offdiag_sq: float, lam: np.ndarray
) -> np.ndarray:
    """Eigenvalues strictly below each lam, via the LDL^T pivot signs.

    The recurrence is sequential along the diagonal but vectorises over
    the shift values, which is what the batched bisection exploits.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    tiny = np.finfo(float).tiny
    q = diag[0] - lam
    count = (q < 0.0).astype(np.int64)
    for d in diag[1:]:
        q = np.where(q == 0.0, -tiny, q)
        q = (d - lam) - offdiag_sq / q
        count += q < 0.0
    return count


def _negative_eigenvalues(
    diag: np.ndarray, offdiag_sq: float, floor: float, k_max: int | None
) -> list[float]:
    total = int(_count_below(diag, offdiag_sq, np.array([0.0]))[0])
    k = total if k_max is None else min(k_max, total)
    if k == 0:
        return []
    lo = np.full(k, floor)
    hi = np.zeros(k)
    ranks = np.arange(1, k + 1)
    while float(np.max(hi - lo)) > _EIG_TOL:
        mid = 0.5 * (lo + hi)
        counts = _count_below(diag, offdiag_sq, mid)
        found = counts >= ranks
        hi = np.where(found, mid, hi)
        lo = np.where(found, lo, mid)
    return [float(v) for v in 0.5 * (lo + hi)]


def _assemble(pot: Potential, grid: FdGrid) -> tuple[np.ndarray, float, float]:
    h = grid.h
    v = pot.evaluate_many(grid.points)
    diag = 1.0 / (pot.mass * h * h) + v
    offdiag = -1.0 / (2.0 * pot.mass * h * h)
    # Gershgorin puts every eigenvalue at or above min(V).
    floor = float(np.min(v)) - 1e-9
    return diag, offdiag * offdiag, floor


def fd_spectrum(
    pot: Potential,
    grid: FdGrid | None = None,
    k_max: int | None = None,
    check_box: bool = True,
) -> list[float]:
    """Negative eigenvalues of the discretised problem, ascending.

    With check_box the grid is widened by whole steps (same h) and the
    ground eigenvalue recomputed; disagreement means the box clipped
    the wavefunction tails and the result cannot be trusted.
    """
    if grid is None:
        grid = default_grid(pot)
    diag, off_sq, floor = _assemble(pot, grid)
    levels = _negative_eigenvalues(diag, off_sq, floor, k_max)
    if check_box and levels:
        n_extra = math.ceil(_BOX_EXTENSION / grid.h)
        wide = FdGrid(
            grid.x_left - n_extra * grid.h,
            grid.x_right + n_extra * grid.h,
            grid.n_points + 2 * n_extra,
        )
        diag_w, off_sq_w, floor_w = _assemble(pot, wide)
        ground_wide = _negative_eigenvalues(diag_w, off_sq_w, floor_w, 1)
        shift = abs(ground_wide[0] - levels[0]) if ground_wide else math.inf
        if shift > _BOX_SHIFT_TOL:
            raise BoxError(
                f"ground eigenvalue moved by {shift:.3e} when the box grew; "
                "enlarge the grid padding"
            )
    return levels


def empirical_order(
    pot: Potential, base_grid: FdGrid | None = None, k: int = 0
) -> float:
    """Observed convergence order of the k-th eigenvalue under h -> h/2.

    Runs the same box at n, 2n+1 and 4n+3 interior points (exact step
    halvings) and returns log2 of the successive difference ratio. The
    box-truncation error is h-independent, so it cancels here and the
    box check is skipped.
    """
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    if base_grid is None:
        base_grid = default_grid(pot)
    estimates = []
    n = base_grid.n_points
    for _ in range(3):
        grid = FdGrid(base_grid.x_left, base_grid.x_right, n)
        levels = fd_spectrum(pot, grid, k_max=k + 1, check_box=False)
        if len(levels) <= k:
            raise ConfigError(
                f"eigenvalue index {k} not present (found {len(levels)})"
            )
        estimates.append(levels[k])
        n = 2 * n + 1
    d1 = abs(estimates[0] - estimates[1])
    d2 = abs(estimates[1] - estimates[2])
    if d2 == 0.0:
        raise ConfigError("refinement differences vanished; cannot fit an order")
    return math.log2(d1 / d2)
