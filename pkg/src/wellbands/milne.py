"""Adaptive integration of the first-order amplitude-phase system.

The wave equation F'' + 2m(E - V)F = 0 is solved exactly through the
representation F = A(x)*sin(p(x) + const), where the amplitude obeys
the nonlinear companion equation A'' + 2m(E - V)A = A^(-3) and the
phase advances as p' = A^(-2). The state vector y = (A, A', p) is
marched with an embedded Dormand-Prince 4(5) pair; the same step core
handles a single state of shape (3,) or a batch of shape (3, K) with
one energy per column, which is what makes dense energy scans cheap.

Exterior tails (V = 0, E < 0) are integrated in chunks of length pi
until the phase increment over a chunk drops below tail_phase_tol;
since A grows like e^(kappa*|x|) out there, p' = A^(-2) dies off
geometrically and the accumulated phase converges fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    AmplitudeCollapseError,
    ConfigError,
    NoBoundTailError,
    NonMonotonicPhaseError,
    StepUnderflowError,
    TailDivergenceError,
)
from .potential import Potential

# Dormand-Prince 4(5) tableau. The fifth-order weights coincide with the
# last stage row (FSAL), so k7 of an accepted step seeds the next one.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_MAX_GROW = 5.0
_MIN_SHRINK = 0.2
_SAFETY = 0.9


@dataclass(frozen=True)
class AmplitudePhaseState:
    """Point value of the amplitude-phase triple (A, A', p)."""

    a: float
    a_prime: float
    p: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise AmplitudeCollapseError(
                f"amplitude must be positive, got a={self.a}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.a_prime, self.p], dtype=float)

    @classmethod
    def from_array(cls, y: np.ndarray) -> "AmplitudePhaseState":
        return cls(float(y[0]), float(y[1]), float(y[2]))


@dataclass(frozen=True)
class SolverSettings:
    """Integrator tolerances and tail-convergence criteria."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    tail_phase_tol: float = 1e-12
    tail_max_extent: float = 200.0

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "tail_phase_tol", "tail_max_extent"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")


def _deriv(y: np.ndarray, w) -> np.ndarray:
    """System right-hand side; w = 2m(E - V) broadcast over columns."""
    a = y[0]
    inv2 = 1.0 / (a * a)
    out = np.empty_like(y)
    out[0] = y[1]
    out[1] = inv2 / a - w * a
    out[2] = inv2
    return out


def _stages(y, k1, x, h, energy, vfunc, two_m):
    """One trial Dormand-Prince step from x by h.

    Returns (y_new, k_last, err) or None when an intermediate amplitude
    left the positive domain, which just means h was too ambitious.
    """
    y2 = y + (_A21 * h) * k1
    if np.min(y2[0]) <= 0.0:
        return None
    k2 = _deriv(y2, two_m * (energy - vfunc(x + 0.2 * h)))
    y3 = y + h * (_A31 * k1 + _A32 * k2)
    if np.min(y3[0]) <= 0.0:
        return None
    k3 = _deriv(y3, two_m * (energy - vfunc(x + 0.3 * h)))
    y4 = y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3)
    if np.min(y4[0]) <= 0.0:
        return None
    k4 = _deriv(y4, two_m * (energy - vfunc(x + 0.8 * h)))
    y5 = y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4)
    if np.min(y5[0]) <= 0.0:
        return None
    k5 = _deriv(y5, two_m * (energy - vfunc(x + (8.0 / 9.0) * h)))
    y6 = y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
    if np.min(y6[0]) <= 0.0:
        return None
    k6 = _deriv(y6, two_m * (energy - vfunc(x + h)))
    y7 = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
    if np.min(y7[0]) <= 0.0:
        return None
    k7 = _deriv(y7, two_m * (energy - vfunc(x + h)))
    err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
    return y7, k7, err


def _advance(y, x0, x1, energy, vfunc, two_m, settings):
    """March y from x0 to x1 (either direction).

    y has shape (3,) or (3, K); energy is a scalar or a length-K vector.
    The error norm is the max over all components and columns, so a
    batch shares one step sequence set by its most demanding member.
    """
    span = x1 - x0
    if span == 0.0:
        return y
    sgn = 1.0 if span > 0.0 else -1.0
    rel, atol = settings.rel_tol, settings.abs_tol
    x = x0
    h = sgn * min(0.1, abs(span))
    k1 = _deriv(y, two_m * (energy - vfunc(x)))
    while sgn * (x1 - x) > 0.0:
        landing = sgn * (x + h) >= sgn * x1
        if landing:
            h = x1 - x
        trial = _stages(y, k1, x, h, energy, vfunc, two_m)
        if trial is None:
            h *= 0.5
        else:
            y_new, k_last, err = trial
            scale = atol + rel * np.maximum(np.abs(y), np.abs(y_new))
            enorm = float(np.max(np.abs(err) / scale))
            if enorm <= 1.0:
                if np.min(y_new[0]) <= 0.0:
                    raise AmplitudeCollapseError(
                        f"amplitude collapsed near x={x + h:.6g}"
                    )
                if float(np.min(sgn * (y_new[2] - y[2]))) < 0.0:
                    raise NonMonotonicPhaseError(
                        f"phase moved against the integration direction near x={x + h:.6g}"
                    )
                x = x1 if landing else x + h
                y = y_new
                k1 = k_last
                grow = _MAX_GROW if enorm == 0.0 else min(
                    _MAX_GROW, _SAFETY * enorm ** -0.2
                )
                h *= grow
            else:
                h *= max(_MIN_SHRINK, _SAFETY * enorm ** -0.2)
        if abs(h) < 1e-14 * max(1.0, abs(x)):
            raise StepUnderflowError(
                f"step size underflow at x={x:.6g}; tolerances unreachable"
            )
    return y


def _zero_v(x: float) -> float:
    return 0.0


def _tail_batch(y, direction, energies, two_m, settings):
    """Chunked exterior tail integration for a batch of states.

    Starts every column at its own state (the free system is autonomous,
    so a common nominal origin is fine) and integrates pi-chunks until
    each column's per-chunk phase increment falls under tail_phase_tol.
    Returns (magnitudes, converged): converged[i] is False for columns
    still moving when tail_max_extent ran out.
    """
    k_cols = y.shape[1]
    phases = np.zeros(k_cols)
    converged = np.zeros(k_cols, dtype=bool)
    if k_cols == 0:
        return phases, converged
    p_start = y[2].copy()
    idx = np.arange(k_cols)
    ya = y.copy()
    e_act = np.asarray(energies, dtype=float).copy()
    x = 0.0
    traveled = 0.0
    while idx.size and traveled < settings.tail_max_extent:
        p_before = ya[2].copy()
        ya = _advance(ya, x, x + direction * math.pi, e_act, _zero_v, two_m, settings)
        x += direction * math.pi
        traveled += math.pi
        done = np.abs(ya[2] - p_before) < settings.tail_phase_tol
        if done.any():
            hit = idx[done]
            phases[hit] = np.abs(ya[2, done] - p_start[hit])
            converged[hit] = True
            keep = ~done
            ya = ya[:, keep]
            idx = idx[keep]
            e_act = e_act[keep]
    return phases, converged


def _free_tail_phase(y, direction, energies, two_m):
    """Exact outward phase across a zero-potential exterior tail.

    With V identically zero the amplitude equation solves in closed
    form (a cosh/sinh quadratic under the square root), and the phase
    integral collapses to a difference of arctangents. No stepping, no
    truncation; valid for any E < 0 and any handoff state.
    """
    a = np.asarray(y[0], dtype=float)
    slope = direction * np.asarray(y[1], dtype=float)
    kappa = np.sqrt(np.asarray(energies, dtype=float) * -two_m)
    gamma = a * slope
    beta = (1.0 + gamma * gamma) / (a * a)
    return np.arctan(beta / kappa + gamma) - np.arctan(gamma)


def _free_tail_profile(y, direction, u, energy, two_m):
    """Amplitude and accumulated phase at outward distances u into a
    zero-potential tail, plus the total phase at infinity.

    Same closed form as _free_tail_phase, kept separate because here
    the whole profile is needed, not just the limit.
    """
    a0 = float(y[0])
    gamma = a0 * direction * float(y[1])
    al = a0 * a0
    beta = (1.0 + gamma * gamma) / al
    kappa = math.sqrt(-two_m * energy)
    u = np.asarray(u, dtype=float)
    ch = np.cosh(kappa * u)
    sh = np.sinh(kappa * u)
    amp = np.sqrt(
        al * ch * ch
        + 2.0 * gamma * ch * sh / kappa
        + beta * sh * sh / (kappa * kappa)
    )
    q = np.arctan(beta * np.tanh(kappa * u) / kappa + gamma) - math.atan(gamma)
    total = math.atan(beta / kappa + gamma) - math.atan(gamma)
    return amp, q, total


def rhs(
    state: AmplitudePhaseState, x: float, energy: float, pot: Potential
) -> tuple[float, float, float]:
    """Derivative (dA, dA', dp) of the amplitude-phase system at x."""
    if not state.a > 0.0:
        raise AmplitudeCollapseError(f"amplitude must be positive, got a={state.a}")
    w = 2.0 * pot.mass * (energy - pot.evaluate(x))
    inv2 = 1.0 / (state.a * state.a)
    return (state.a_prime, inv2 / state.a - w * state.a, inv2)


def integrate_interval(
    state0: AmplitudePhaseState,
    x0: float,
    x1: float,
    energy: float,
    pot: Potential,
    settings: SolverSettings | None = None,
) -> AmplitudePhaseState:
    """Propagate a state across [x0, x1]; both directions allowed.

    A zero-length interval returns state0 unchanged. Integrating
    leftward decreases p, since dp carries the sign of dx.
    """
    if x1 == x0:
        return state0
    settings = settings or SolverSettings()
    y = _advance(
        state0.as_array(), x0, x1, energy, pot.evaluate, 2.0 * pot.mass, settings
    )
    return AmplitudePhaseState.from_array(y)


def integrate_tail(
    state0: AmplitudePhaseState,
    x_start: float,
    direction: int,
    energy: float,
    mass: float,
    settings: SolverSettings | None = None,
) -> float:
    """Converged phase magnitude accumulated over a zero-potential tail.

    The potential must vanish identically beyond x_start in the given
    direction. For direction -1 the accumulated phase is negative and
    its magnitude is returned.
    """
    if direction not in (1, -1):
        raise ConfigError(f"direction must be +1 or -1, got {direction}")
    if not mass > 0.0:
        raise ConfigError(f"mass must be positive, got {mass}")
    if energy >= 0.0:
        raise NoBoundTailError(f"bound tail requires E < 0, got E={energy}")
    settings = settings or SolverSettings()
    y = state0.as_array().reshape(3, 1)
    phases, converged = _tail_batch(
        y, direction, np.array([energy]), 2.0 * mass, settings
    )
    if not converged[0]:
        raise TailDivergenceError(
            f"tail phase at E={energy} not converged within "
            f"{settings.tail_max_extent} length units"
        )
    return float(phases[0])


def dense_path(
    state0: AmplitudePhaseState,
    x0: float,
    x1: float,
    n_steps: int,
    energy: float,
    pot: Potential,
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step classical RK4 trajectory on n_steps+1 equispaced points.

    Deliberately independent of the adaptive controller so that residual
    checks against the underlying differential equations do not inherit
    its step choices. Returns (xs, ys) with ys of shape (3, n_steps+1).
    """
    if n_steps < 1:
        raise ConfigError(f"n_steps must be >= 1, got {n_steps}")
    xs = np.linspace(x0, x1, n_steps + 1)
    h = (x1 - x0) / n_steps
    ys = np.empty((3, n_steps + 1))
    y = state0.as_array()
    ys[:, 0] = y
    two_m = 2.0 * pot.mass
    v = pot.evaluate
    for i in range(n_steps):
        x = xs[i]
        k1 = _deriv(y, two_m * (energy - v(x)))
        k2 = _deriv(y + (0.5 * h) * k1, two_m * (energy - v(x + 0.5 * h)))
        k3 = _deriv(y + (0.5 * h) * k2, two_m * (energy - v(x + 0.5 * h)))
        k4 = _deriv(y + h * k3, two_m * (energy - v(x + h)))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[:, i + 1] = y
    return xs, ys
