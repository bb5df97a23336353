import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocalqm.errors import InvalidArgument
from nonlocalqm.grid import ModelParams, make_grid
from nonlocalqm.potentials import PotentialSpec, build_potential, fourier_coefficients, second_derivative

GRID = make_grid(256, -8, 8)
PARAMS = ModelParams(l_P=0.5)          # beta = 2, beta^2/2m = 2


def test_kinds_on_nodes():
    x = GRID.x
    assert np.all(build_potential(PotentialSpec.free(), GRID, PARAMS) == 0)
    assert np.all(build_potential(PotentialSpec.constant(1.5), GRID, PARAMS) == 1.5)
    sq = build_potential(PotentialSpec.square_well(2.0, 7.0), GRID, PARAMS)
    assert np.array_equal(sq, np.where(np.abs(x) >= 2.0, 7.0, 0.0))
    cw = build_potential(PotentialSpec.cutoff_well(2.0), GRID, PARAMS)
    assert cw.max() == 2.0
    ch = build_potential(PotentialSpec.cutoff_harmonic(1.0), GRID, PARAMS)
    # the plateau starts at |x| = beta / (m w) = 2 and joins continuously
    assert np.allclose(ch, np.minimum(0.5 * x**2, 2.0))


@pytest.mark.parametrize("kw", [dict(kind="nope"), dict(kind="square_well", half_width=0, V0=1.0),
                                dict(kind="square_well", half_width=1.0), dict(kind="square_well", half_width=1.0, V0=-1.0),
                                dict(kind="harmonic"), dict(kind="tabulated"), dict(kind="constant")])
def test_invalid_specs(kw):
    with pytest.raises(InvalidArgument):
        PotentialSpec(**kw)


def test_tabulated_needs_matching_grid():
    spec = PotentialSpec.tabulated(np.arange(10.0))
    with pytest.raises(InvalidArgument):
        build_potential(spec, GRID, PARAMS)
    with pytest.raises(InvalidArgument):
        spec.evaluate(0.3, PARAMS)


def test_tabulated_interpolates_periodically():
    spec = PotentialSpec.tabulated(np.sin(2 * np.pi * GRID.x / GRID.length))
    mid = GRID.x[:-1] + GRID.spacing / 2
    vals = spec.evaluate(mid, PARAMS, GRID)
    nodes = np.array(spec.values)
    assert np.allclose(vals, 0.5 * (nodes[:-1] + nodes[1:]))
    # past the right end the table wraps to the first node
    assert spec.evaluate(GRID.x_max, PARAMS, GRID) == pytest.approx(nodes[0])


def test_second_derivative_of_harmonic():
    vpp = second_derivative(PotentialSpec.harmonic(1.5), GRID, PARAMS.replace(mass=2.0))
    assert np.allclose(vpp, 2.0 * 1.5**2, rtol=1e-10)


@given(k=st.integers(-40, 40))
def test_exact_fourier_coefficients_against_fine_quadrature(k):
    q = k * GRID.dp
    fine = np.linspace(GRID.x_min, GRID.x_max, 400001)
    for spec in (PotentialSpec.harmonic(1.0), PotentialSpec.cutoff_harmonic(1.0), PotentialSpec.cutoff_well(2.0)):
        v = spec.evaluate(fine, PARAMS)
        ref = np.trapezoid(v * np.exp(-1j * q * fine), fine) / GRID.length
        got = fourier_coefficients(spec, GRID, PARAMS, np.array([q]))[0]
        # the trapezoid oracle is first order at the wall jumps (step 4e-5)
        assert abs(got - ref) <= 1e-5


def test_fourier_coefficients_of_simple_cases():
    q = np.array([0.0, GRID.dp, -3 * GRID.dp])
    assert np.allclose(fourier_coefficients(PotentialSpec.constant(2.0), GRID, PARAMS, q), [2.0, 0, 0])
    assert np.all(fourier_coefficients(PotentialSpec.free(), GRID, PARAMS, q) == 0)
    # a well [-l, l] of depth W below the wall: mean = W (1 - 2l / L)
    c0 = fourier_coefficients(PotentialSpec.cutoff_well(2.0), GRID, PARAMS, np.array([0.0]))[0]
    assert c0 == pytest.approx(2.0 * (1 - 4.0 / 16.0))
    with pytest.raises(InvalidArgument):
        fourier_coefficients(PotentialSpec.cutoff_well(9.0), GRID, PARAMS, q)
