import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocalqm.classical import (
    EXPONENT_CUTOFF,
    ClassicalPotential,
    ClassicalState,
    effective_planck_length,
    hamiltonian_value,
    integrate_orbit,
    integrate_theta_cutoff,
    modified_rhs,
    suppression_factor,
    theta_cutoff_rhs,
)
from nonlocalqm.errors import IntegrationFailure, InvalidArgument, SingularityError
from nonlocalqm.grid import ModelParams

KEPLER = ClassicalPotential.kepler(1.0)


def test_state_validation_and_flat_round_trip():
    s = ClassicalState([1.0, 2.0], [3.0, 4.0], 0.5)
    back = ClassicalState.from_flat(s.flat(), 0.5)
    assert np.array_equal(back.position, s.position) and np.array_equal(back.momentum, s.momentum)
    assert s.dim == 2
    for bad in [([1.0], [1.0, 2.0]), ([1, 2, 3, 4], [1, 2, 3, 4]), ([np.nan], [0.0])]:
        with pytest.raises(InvalidArgument):
            ClassicalState(*bad)


def test_potentials():
    r = np.array([3.0, 4.0])
    assert KEPLER.value(r) == pytest.approx(-0.2)
    h = 1e-6
    num = [(KEPLER.value(r + h * e) - KEPLER.value(r - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(KEPLER.gradient(r), num, rtol=1e-8)
    with pytest.raises(SingularityError):
        KEPLER.value(np.zeros(2))
    with pytest.raises(SingularityError):
        KEPLER.gradient(np.zeros(3))
    osc = ClassicalPotential.harmonic(2.0, mass=3.0)
    assert osc.value(r) == pytest.approx(0.5 * 12.0 * 25.0)
    custom = ClassicalPotential.custom(lambda x: float(x @ x), lambda x: 2 * x)
    assert np.allclose(custom.gradient(r), 2 * r)
    with pytest.raises(InvalidArgument):
        ClassicalPotential("custom")
    with pytest.raises(InvalidArgument):
        ClassicalPotential("yukawa")


@given(x=st.floats(0.5, 3), y=st.floats(-2, 2), px=st.floats(-3, 3), py=st.floats(-3, 3),
       l=st.floats(0.0, 1.5))
def test_rhs_is_hamiltons_equations(x, y, px, py, l):
    params = ModelParams(l_P=l, beta=1.0)
    s = ClassicalState([x, y], [px, py])
    rdot, pdot = modified_rhs(s, KEPLER, params)
    h = 1e-6
    H = lambda r, p: hamiltonian_value(ClassicalState(r, p), KEPLER, params)
    dH_dp = [(H(s.position, s.momentum + h * e) - H(s.position, s.momentum - h * e)) / (2 * h) for e in np.eye(2)]
    dH_dr = [(H(s.position + h * e, s.momentum) - H(s.position - h * e, s.momentum)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(rdot, dH_dp, atol=1e-7)
    assert np.allclose(pdot, -np.array(dH_dr), atol=1e-7)


def test_suppression_magnitudes():
    # 6e24 kg at 30 km/s with hbar / l_P = 6.5 kg m/s
    params = ModelParams(hbar=1.0, l_P=1 / 6.5)
    rep = suppression_factor(6e24, 3e4, params)
    assert rep.exponent == pytest.approx(1.917159763313609e56, rel=1e-12)
    assert rep.log10_factor == pytest.approx(-rep.exponent / np.log(10))
    assert rep.factor == 0.0
    small = suppression_factor(1.0, 1.0, params)
    assert small.exponent < EXPONENT_CUTOFF
    assert small.factor == pytest.approx(np.exp(-1 / (4 * 6.5**2)))
    with pytest.raises(InvalidArgument):
        suppression_factor(0.0, 1.0, params)
    # the flow switches the potential off once the exponent passes the cutoff
    fast = ClassicalState([1.0, 0.0], [0.0, 1e3])
    assert np.all(modified_rhs(fast, KEPLER, ModelParams(l_P=1.0))[1] == 0)


def test_effective_planck_length():
    assert effective_planck_length(2.0, 1e6, 0.5) == pytest.approx(2e-3)
    assert effective_planck_length(2.0, 1e6, 0.0) == 2.0
    with pytest.raises(InvalidArgument):
        effective_planck_length(1.0, 0.5, 1.0)
    with pytest.raises(InvalidArgument):
        effective_planck_length(1.0, 10.0, -1.0)


def test_harmonic_orbit_matches_closed_form():
    params = ModelParams(l_P=0.0, beta=1.0)
    res = integrate_orbit(ClassicalState([1.0], [0.0]), ClassicalPotential.harmonic(1.0), params, 10.0,
                          tol=1e-10, reference=False)
    assert np.max(np.abs(res.positions[:, 0] - np.cos(res.times))) <= 1e-10
    assert res.energy_drift <= 1e-10


def test_weak_deformation_tracks_newtonian_orbit():
    tol = 1e-8
    s0 = ClassicalState([1.0, 0.0], [0.0, 1.2])
    params = ModelParams(l_P=1e-7, beta=1.0)
    period = 2 * np.pi * (1 / (2 / 1.0 - 1.2**2)) ** 1.5
    res = integrate_orbit(s0, KEPLER, params, 3.5 * period, tol=tol)
    assert res.max_deviation <= 10 * tol
    assert res.energy_drift <= tol
    assert res.perihelion_angles.size == 3
    # the start is a perihelion on the x axis
    assert np.max(np.abs(res.perihelion_angles)) <= 10 * tol
    assert np.allclose(res.perihelion_times, period * np.arange(1, 4), rtol=1e-6)


def test_strong_deformation_precesses_but_conserves_h():
    s0 = ClassicalState([1.0, 0.0], [0.0, 1.2])
    res = integrate_orbit(s0, KEPLER, ModelParams(l_P=0.3, beta=1.0), 60.0, tol=1e-8)
    assert res.energy_drift <= 1e-8
    assert res.max_deviation > 1e-2
    steps = np.diff(res.perihelion_angles)
    assert np.all(np.abs(steps) > 1e-3) and np.allclose(steps, steps[0], rtol=1e-5)


def test_failures():
    with pytest.raises(InvalidArgument):
        integrate_orbit(ClassicalState([1.0], [0.0]), KEPLER, ModelParams(l_P=0.1), 0.0)
    with pytest.raises(SingularityError):
        integrate_orbit(ClassicalState([0.0, 0.0], [1.0, 0.0]), KEPLER, ModelParams(l_P=0.1), 1.0)
    with pytest.raises(IntegrationFailure) as info:
        integrate_orbit(ClassicalState([1.0, 0.0], [0.0, 0.0]), KEPLER, ModelParams(l_P=0.0, beta=1.0), 3.0,
                        tol=1e-8, reference=False)
    assert info.value.partial is not None


def test_theta_rhs_branches():
    params = ModelParams(l_P=0.5)        # beta = 2
    osc = ClassicalPotential.harmonic(1.0)
    inside = ClassicalState([1.0], [1.0])
    outside = ClassicalState([1.0], [3.0])
    assert np.allclose(np.concatenate(theta_cutoff_rhs(inside, osc, params)), [1.0, -1.0])
    assert np.allclose(np.concatenate(theta_cutoff_rhs(outside, osc, params)), [3.0, 0.0])
    assert np.all(np.concatenate(theta_cutoff_rhs(outside, osc, params, "full_hamiltonian")) == 0)
    with pytest.warns(UserWarning, match="cutoff"):
        theta_cutoff_rhs(ClassicalState([1.0], [2.0]), osc, params)
    with pytest.raises(InvalidArgument):
        theta_cutoff_rhs(inside, osc, params, "other")


def test_theta_cutoff_crossing_and_free_flight():
    params = ModelParams(l_P=0.5)        # beta = 2
    osc = ClassicalPotential.harmonic(1.0)
    out = integrate_theta_cutoff(ClassicalState([3.0], [0.0]), osc, params, 2.0)
    t_c = np.arcsin(2 / 3)
    assert len(out.crossings) == 1
    assert out.crossings[0] == pytest.approx(t_c, abs=1e-10)
    after = out.times > t_c + 1e-9
    assert np.allclose(out.momenta[after, 0], -2.0, atol=1e-9)
    x_c = 3 * np.cos(t_c)
    assert np.allclose(out.positions[after, 0], x_c - 2.0 * (out.times[after] - t_c), atol=1e-8)


@given(p=st.floats(2.01, 50.0), x=st.floats(-5, 5))
def test_full_hamiltonian_cutoff_freezes_fast_states(p, x):
    params = ModelParams(l_P=0.5)
    s0 = ClassicalState([x, 1.0], [p, 0.0])
    out = integrate_theta_cutoff(s0, KEPLER, params, 5.0, "full_hamiltonian", n_frames=11)
    assert np.all(out.positions == s0.position) and np.all(out.momenta == s0.momentum)
    assert out.crossings == []
