import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from wellbands import (
    AmplitudeCollapseError,
    AmplitudePhaseState,
    ConfigError,
    NoBoundTailError,
    Potential,
    SolverSettings,
)
from wellbands.milne import (
    _free_tail_phase,
    dense_path,
    integrate_interval,
    integrate_tail,
    rhs,
)
from reference_values import FREE_TAIL

FREE = Potential(0.0, 0.0, 2, mass=1.0)


def test_rhs_values():
    # A=1, A'=0, E=0.5, V=0: the constant-amplitude fixed point
    d = rhs(AmplitudePhaseState(1.0, 0.0, 0.0), 1.0, 0.5, FREE)
    assert d == pytest.approx((0.0, 0.0, 1.0), abs=1e-15)
    # w=0 leaves only the A^(-3) term
    d = rhs(AmplitudePhaseState(1.0, 0.0, 0.0), 1.0, 0.0, FREE)
    assert d == pytest.approx((0.0, 1.0, 1.0), abs=1e-15)
    d = rhs(AmplitudePhaseState(2.0, 1.0, 0.3), 1.0, 0.5, FREE)
    assert d == pytest.approx((1.0, 0.125 - 2.0, 0.25), abs=1e-15)


def test_state_validation():
    with pytest.raises(AmplitudeCollapseError):
        AmplitudePhaseState(0.0, 1.0, 0.0)
    with pytest.raises(AmplitudeCollapseError):
        AmplitudePhaseState(-1.0, 0.0, 0.0)
    s = AmplitudePhaseState(2.0, -1.0, 0.5)
    assert AmplitudePhaseState.from_array(s.as_array()) == s


def test_settings_validation():
    with pytest.raises(ConfigError):
        SolverSettings(rel_tol=0.0)
    with pytest.raises(ConfigError):
        SolverSettings(abs_tol=-1e-10)
    with pytest.raises(ConfigError):
        SolverSettings(tail_phase_tol=0.0)
    with pytest.raises(ConfigError):
        SolverSettings(tail_max_extent=-3.0)


def test_constant_amplitude_fixed_point():
    # At w = 1 the system reduces to A=1, p=x: one cell gives p=pi.
    out = integrate_interval(AmplitudePhaseState(1.0, 0.0, 0.0), 0.0, math.pi, 0.5, FREE)
    assert out.a == pytest.approx(1.0, abs=1e-10)
    assert out.a_prime == pytest.approx(0.0, abs=1e-10)
    assert out.p == pytest.approx(math.pi, abs=1e-10)


def test_zero_length_interval():
    s = AmplitudePhaseState(1.3, -0.2, 0.9)
    assert integrate_interval(s, 2.0, 2.0, -0.5, FREE) is s


def test_leftward_integration_decreases_phase():
    out = integrate_interval(AmplitudePhaseState(1.0, 0.0, 0.0), math.pi, 0.0, 0.5, FREE)
    assert out.p == pytest.approx(-math.pi, abs=1e-10)


def test_reversibility():
    pot = Potential(-1.35, -1.25, 2)
    fwd = integrate_interval(
        AmplitudePhaseState(1.0, 0.0, 0.0), pot.junction, 0.0, -0.8, pot
    )
    back = integrate_interval(fwd, 0.0, pot.junction, -0.8, pot)
    assert back.a == pytest.approx(1.0, abs=1e-8)
    assert back.a_prime == pytest.approx(0.0, abs=1e-8)
    assert back.p == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("kappa", sorted(FREE_TAIL))
def test_tail_against_closed_form(kappa):
    energy = -0.5 * kappa * kappa
    start = AmplitudePhaseState(1.0, 0.0, 0.0)
    for direction in (1, -1):
        tail = integrate_tail(start, 0.0, direction, energy, 1.0)
        assert tail == pytest.approx(FREE_TAIL[kappa], abs=1e-8)


def test_tail_input_validation():
    s = AmplitudePhaseState(1.0, 0.0, 0.0)
    with pytest.raises(NoBoundTailError):
        integrate_tail(s, 0.0, 1, 0.0, 1.0)
    with pytest.raises(NoBoundTailError):
        integrate_tail(s, 0.0, 1, 0.25, 1.0)
    with pytest.raises(ConfigError):
        integrate_tail(s, 0.0, 0, -0.5, 1.0)
    with pytest.raises(ConfigError):
        integrate_tail(s, 0.0, 1, -0.5, 0.0)


@hyp_settings(max_examples=40, deadline=None)
@given(
    a=st.floats(min_value=0.3, max_value=3.0),
    a_prime=st.floats(min_value=-2.0, max_value=2.0),
    energy=st.floats(min_value=-3.0, max_value=-0.05),
    mass=st.floats(min_value=0.2, max_value=4.0),
    direction=st.sampled_from([1, -1]),
)
def test_chunked_tail_matches_exact_phase(a, a_prime, energy, mass, direction):
    """The stepped tail must reproduce the closed-form free-tail phase
    for arbitrary handoff states, not just the flat (1, 0) one."""
    state = AmplitudePhaseState(a, a_prime, 0.0)
    numeric = integrate_tail(state, 0.0, direction, energy, mass)
    exact = _free_tail_phase(
        state.as_array().reshape(3, 1),
        direction,
        np.array([energy]),
        2.0 * mass,
    )[0]
    assert numeric == pytest.approx(exact, abs=1e-7)


def test_tail_start_position_irrelevant():
    # the exterior problem is autonomous: x_start is just a label
    s = AmplitudePhaseState(1.2, 0.4, 2.0)
    t1 = integrate_tail(s, 0.0, 1, -0.6, 2.0)
    t2 = integrate_tail(s, 17.5, 1, -0.6, 2.0)
    assert t1 == pytest.approx(t2, abs=1e-12)


def test_dense_path_matches_adaptive_endpoint():
    pot = Potential(-1.25, -1.25, 2)
    energy = -0.78
    xs, ys = dense_path(
        AmplitudePhaseState(1.0, 0.0, 0.0), pot.junction, pot.support_end, 4000,
        energy, pot,
    )
    assert xs.shape == (4001,)
    assert ys.shape == (3, 4001)
    end = integrate_interval(
        AmplitudePhaseState(1.0, 0.0, 0.0), pot.junction, pot.support_end, energy, pot
    )
    assert ys[0, -1] == pytest.approx(end.a, abs=1e-8)
    assert ys[2, -1] == pytest.approx(end.p, abs=1e-8)
    # p' = A^(-2) > 0: phase must climb along the path
    assert (np.diff(ys[2]) > 0.0).all()


def test_dense_path_validation():
    with pytest.raises(ConfigError):
        dense_path(AmplitudePhaseState(1.0, 0.0, 0.0), 0.0, 1.0, 0, -0.5, FREE)


def test_tolerance_consistency():
    pot = Potential(-1.35, -1.25, 4)
    start = AmplitudePhaseState(1.0, 0.0, 0.0)
    loose = integrate_interval(
        start, pot.junction, 0.0, -0.8, pot, SolverSettings(rel_tol=1e-6, abs_tol=1e-6)
    )
    tight = integrate_interval(
        start, pot.junction, 0.0, -0.8, pot, SolverSettings(rel_tol=1e-12, abs_tol=1e-12)
    )
    assert loose.p == pytest.approx(tight.p, abs=1e-5)
    assert loose.a == pytest.approx(tight.a, rel=1e-5)
