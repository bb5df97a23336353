import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from nonlocalqm.errors import InvalidArgument, InvalidState
from nonlocalqm.grid import (
    ModelParams,
    WaveFunction,
    boundary_mass,
    gaussian,
    make_grid,
    observables,
    plane_wave,
    transform,
)


def test_make_grid_spacing_and_momentum_span():
    g = make_grid(256, -16, 16)
    assert g.spacing == 0.125
    assert g.momentum_grid[0] == pytest.approx(-8 * np.pi)
    assert g.momentum_grid[-1] < 8 * np.pi
    assert g.dp == pytest.approx(2 * np.pi / 32)
    g = make_grid(16, 0, 16)
    assert g.spacing == 1.0
    assert g.momentum_grid[0] == pytest.approx(-np.pi)


@pytest.mark.parametrize("args", [(100, -1, 1), (8, -1, 1), (64, 1, 1), (64, 2, 1)])
def test_make_grid_rejects(args):
    with pytest.raises(InvalidArgument):
        make_grid(*args)


def test_model_params_defaults_and_replace():
    p = ModelParams(l_P=0.2)
    assert p.beta == pytest.approx(5.0)
    assert p.replace(l_P=0.5).beta == pytest.approx(2.0)
    fixed = ModelParams(l_P=0.2, beta=3.0)
    assert fixed.replace(l_P=0.5).beta == 3.0
    with pytest.raises(InvalidArgument):
        ModelParams(l_P=0.0)
    assert ModelParams(l_P=0.0, beta=1.0).k_P == np.inf
    with pytest.raises(InvalidArgument):
        ModelParams(hbar=-1.0)


@pytest.mark.parametrize("n", [64, 256, 1024])
def test_round_trip_and_parseval(rng, n):
    g = make_grid(n, -10, 7)
    worst_rt = worst_pv = 0.0
    for _ in range(1000):
        psi = random_state(rng, g)
        chi = transform(psi, "position-to-momentum")
        back = transform(chi, "momentum-to-position")
        worst_rt = max(worst_rt, np.max(np.abs(back.amplitudes - psi.amplitudes)) / np.max(np.abs(psi.amplitudes)))
        n_x = np.sum(np.abs(psi.amplitudes) ** 2) * g.spacing
        n_p = np.sum(np.abs(chi.amplitudes) ** 2) * g.dp
        worst_pv = max(worst_pv, abs(n_x - n_p) / n_x)
    assert worst_rt <= 1e-12
    assert worst_pv <= 1e-12


def test_transform_direction_errors():
    g = make_grid(32, -1, 1)
    psi = gaussian(g)
    with pytest.raises(InvalidArgument):
        transform(psi, "momentum-to-position")
    with pytest.raises(InvalidArgument):
        transform(psi, "sideways")


def test_constant_goes_to_zero_mode():
    g = make_grid(64, -5, 5)
    chi = WaveFunction(g, np.ones(64)).momentum().amplitudes
    k0 = np.argmin(np.abs(g.momentum_grid))
    assert g.momentum_grid[k0] == 0
    mask = np.ones(64, bool)
    mask[k0] = False
    assert np.max(np.abs(chi[mask])) < 1e-13 * abs(chi[k0])


def test_plane_wave_is_a_single_spike():
    g = make_grid(128, -4, 4)
    p0 = 5 * g.dp
    chi = plane_wave(g, p0).momentum().amplitudes
    k = np.argmax(np.abs(chi))
    assert g.momentum_grid[k] == pytest.approx(p0)
    assert np.sum(np.abs(chi) ** 2) * g.dp == pytest.approx(1.0)
    assert np.sum(np.abs(np.delete(chi, k)) ** 2) < 1e-26


def test_gaussian_transform_matches_analytic_pair():
    # psi = (pi s^2)^-1/4 exp(-(x-x0)^2/2s^2 + i p0 x / hbar) has
    # chi(p) = (s^2/(pi hbar^2))^1/4 exp(-s^2 (p-p0)^2 / 2 hbar^2 - i (p - p0) x0 / hbar)
    hbar = 0.7
    g = make_grid(512, -30, 30, hbar=hbar)
    s, x0, p0 = 1.3, 1.1, 0.4
    chi = gaussian(g, x0, s, p0).momentum().amplitudes
    p = g.momentum_grid
    ref = (s**2 / (np.pi * hbar**2)) ** 0.25 * np.exp(-(s**2) * (p - p0) ** 2 / (2 * hbar**2)
                                                       - 1j * (p - p0) * x0 / hbar)
    assert np.max(np.abs(chi - ref)) < 1e-12


def test_gaussian_moments():
    g = make_grid(1024, -20, 20)
    o = observables(gaussian(g, 1.5, 0.8, 0.0))
    assert o.norm == pytest.approx(1.0, abs=1e-12)
    assert o.mean_x == pytest.approx(1.5, abs=1e-12)
    assert o.delta_x == pytest.approx(0.8 / np.sqrt(2), abs=1e-12)
    assert o.delta_p == pytest.approx(1 / (0.8 * np.sqrt(2)), abs=1e-10)
    assert o.spread_l == o.delta_x


def test_plane_wave_moments():
    g = make_grid(128, -4, 4)
    o = observables(plane_wave(g, 3 * g.dp))
    assert o.mean_p == pytest.approx(3 * g.dp)
    assert o.delta_p < 1e-6


def test_symmetric_state_has_zero_means():
    g = make_grid(256, -8, 8)
    x = g.x
    # symmetric about 0 on the lattice x_j = -8 + j dx (x_0 = -8 is its own mirror image mod L)
    psi = WaveFunction(g, np.exp(-(x**2)) * (1 + 0.3 * np.cos(2 * x)))
    o = observables(psi)
    assert abs(o.mean_x) < 1e-14
    assert abs(o.mean_p) < 1e-14


def test_zero_norm_rejected():
    g = make_grid(16, -1, 1)
    with pytest.raises(InvalidState):
        observables(WaveFunction(g, np.zeros(16)))
    with pytest.raises(InvalidState):
        WaveFunction(g, np.full(16, np.nan))


def test_global_phase_invariance_exact(rng):
    g = make_grid(128, -6, 6)
    psi = random_state(rng, g)
    base = observables(psi)
    for factor in (1j, -1.0, -1j):
        assert observables(psi.with_amplitudes(factor * psi.amplitudes)) == base


@given(st.floats(0, 2 * np.pi))
def test_global_phase_invariance_general(theta):
    g = make_grid(64, -6, 6)
    psi = gaussian(g, 0.3, 1.0, 0.7)
    a = observables(psi).as_dict()
    b = observables(psi.with_amplitudes(np.exp(1j * theta) * psi.amplitudes)).as_dict()
    for k in a:
        assert b[k] == pytest.approx(a[k], rel=1e-14, abs=1e-14)


def test_boundary_mass_small_for_centred_gaussian():
    g = make_grid(256, -20, 20)
    assert boundary_mass(gaussian(g, 0, 1)) < 1e-10
