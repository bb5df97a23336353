"""Hard momentum cutoff: projector, sinc kernel, sampling series and checks."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, PreconditionViolation, UndefinedRatio
from .grid import (
    MOMENTUM,
    Grid1D,
    ModelParams,
    WaveFunction,
    apply_multiplier,
    observables,
    to_position_array,
)
from .operators import OperatorMatrix
from .potentials import PotentialSpec, build_potential

BANDLIMIT_TOL = 1e-10


def _check_nyquist(grid: Grid1D, params: ModelParams):
    if params.beta >= grid.nyquist_momentum:
        raise InvalidArgument(
            f"beta = {params.beta:g} is not below the grid Nyquist momentum "
            f"{grid.nyquist_momentum:g}; the projector would be the identity up to aliasing")


def band_mask(grid: Grid1D, params: ModelParams) -> np.ndarray:
    """Boolean mask of lattice momenta with |p| <= beta, FFT order."""
    return np.abs(grid.p_fft) <= params.beta


def sinc_kernel(x, y, params: ModelParams):
    """``sin(beta (x - y) / hbar) / (pi (x - y))`` with the analytic diagonal."""
    d = np.subtract.outer(np.asarray(x, float), np.asarray(y, float))
    b = params.beta / params.hbar
    return (b / np.pi) * np.sinc(b * d / np.pi)


def sinc_kernel_matrix(grid: Grid1D, params: ModelParams, periodic: bool = False) -> OperatorMatrix:
    """Quadrature matrix of the sinc reproducing kernel, ``M_ij = dx K(x_i, x_j)``.

    The default is the continuum kernel evaluated on the (finite) grid. It
    is only approximately idempotent because the domain truncates the slowly
    decaying tails; ``info['idempotence_defect']`` reports ``max|M^2 - M|``.
    ``periodic=True`` instead gives the periodised kernel, which is the exact
    matrix of the lattice projector and idempotent to rounding.
    """
    _check_nyquist(grid, params)
    if periodic:
        mask = band_mask(grid, params).astype(float)
        col = np.fft.ifft(mask).real
        idx = (np.arange(grid.n_points)[:, None] - np.arange(grid.n_points)[None, :]) % grid.n_points
        entries = col[idx]
    else:
        entries = grid.spacing * sinc_kernel(grid.x, grid.x, params)
    defect = float(np.max(np.abs(entries @ entries - entries)))
    return OperatorMatrix(entries, "sinc_kernel_periodic" if periodic else "sinc_kernel", grid,
                          info={"idempotence_defect": defect})


@dataclass(frozen=True)
class ProjectionReport:
    input_norm: float
    projected_norm: float
    leakage_norm: float
    bandlimited_flag: bool
    tolerance: float = BANDLIMIT_TOL


def project_array(values: np.ndarray, grid: Grid1D, params: ModelParams) -> np.ndarray:
    return apply_multiplier(values, grid, band_mask(grid, params))


def project(psi: WaveFunction, params: ModelParams, tol: float = BANDLIMIT_TOL):
    """Zero every lattice mode with |p| > beta.

    Returns the projected state and a :class:`ProjectionReport`; the input
    counts as band-limited when ``leakage_norm <= tol * input_norm``.
    """
    grid = psi.grid
    _check_nyquist(grid, params)
    pos = psi.position()
    out = project_array(pos.amplitudes, grid, params)
    rest = pos.amplitudes - out
    w = np.sqrt(grid.spacing)
    n_in = float(np.linalg.norm(pos.amplitudes) * w)
    n_out = float(np.linalg.norm(out) * w)
    n_leak = float(np.linalg.norm(rest) * w)
    report = ProjectionReport(n_in, n_out, n_leak, bool(n_leak <= tol * n_in), tol)
    return pos.with_amplitudes(out), report


def project_kernel(psi: WaveFunction, params: ModelParams) -> WaveFunction:
    """Projection through the continuum sinc kernel (independent route)."""
    m = sinc_kernel_matrix(psi.grid, params)
    pos = psi.position()
    return pos.with_amplitudes(m.entries @ pos.amplitudes)


def random_bandlimited(grid: Grid1D, params: ModelParams, rng: np.random.Generator) -> WaveFunction:
    """Random complex amplitudes on |p| < beta, zero elsewhere, normalised."""
    _check_nyquist(grid, params)
    p = grid.momentum_grid
    inside = np.abs(p) < params.beta
    chi = np.zeros(grid.n_points, complex)
    chi[inside] = rng.standard_normal(inside.sum()) + 1j * rng.standard_normal(inside.sum())
    psi = WaveFunction(grid, chi, MOMENTUM).position()
    return psi.normalized()


def sampling_lattice(params: ModelParams, j) -> np.ndarray:
    return params.hbar * np.pi * np.asarray(j) / params.beta


def sampling_reconstruct(sample_x, samples, grid: Grid1D, params: ModelParams) -> WaveFunction:
    """Cardinal series ``sum_j psi(x_j) sinc(beta x / hbar - pi j)`` on the grid.

    ``sample_x`` must be consecutive points of the lattice
    ``x_j = hbar pi j / beta``. The series is truncated to the samples
    supplied, so accuracy near the ends of the sample range is limited by
    how fast the function decays.
    """
    sample_x = np.asarray(sample_x, float)
    samples = np.asarray(samples)
    if sample_x.shape != samples.shape or sample_x.ndim != 1 or sample_x.size == 0:
        raise InvalidArgument("sample_x and samples must be matching 1D arrays")
    step = params.hbar * np.pi / params.beta
    j = sample_x / step
    ji = np.round(j)
    if not np.allclose(j, ji, rtol=0, atol=1e-9) or (
            sample_x.size > 1 and not np.allclose(np.diff(ji), 1)):
        raise InvalidArgument(f"samples must sit on consecutive lattice points with spacing {step:g}")
    if sample_x[0] > grid.x_min or sample_x[-1] < grid.x[-1]:
        warnings.warn("sample lattice does not cover the grid domain", stacklevel=2)
    arg = params.beta * grid.x[:, None] / params.hbar - np.pi * ji[None, :]
    values = np.sinc(arg / np.pi) @ samples
    return WaveFunction(grid, values)


def projection_leakage(psi0: WaveFunction, potential, params: ModelParams) -> float:
    """Out-of-band fraction ``||(1 - P)(V psi0)|| / ||V psi0||``.

    ``potential`` is a :class:`PotentialSpec` or an array of node values.
    """
    grid = psi0.grid
    v = build_potential(potential, grid, params) if isinstance(potential, PotentialSpec) else np.asarray(potential)
    vpsi = v * psi0.position().amplitudes
    total = np.linalg.norm(vpsi)
    if total == 0:
        raise UndefinedRatio("V * psi0 vanishes identically")
    return float(np.linalg.norm(vpsi - project_array(vpsi, grid, params)) / total)


@dataclass(frozen=True)
class UncertaintyCheck:
    delta_x: float
    bound: float
    ratio: float
    satisfied: bool


def uncertainty_bound_check(psi: WaveFunction, params: ModelParams, tol: float = BANDLIMIT_TOL) -> UncertaintyCheck:
    """Compare the position spread of a band-limited state with hbar / (4 beta)."""
    _, report = project(psi, params)
    if report.leakage_norm > tol * report.input_norm:
        raise PreconditionViolation(
            f"state is not band-limited (leakage {report.leakage_norm / report.input_norm:.3e})")
    norm = psi.norm()
    if abs(norm - 1) > 1e-8:
        raise PreconditionViolation(f"state must be normalised, norm = {norm!r}")
    dx = observables(psi).delta_x
    bound = params.hbar / (4 * params.beta)
    return UncertaintyCheck(dx, bound, dx / bound, dx >= bound)


def deformed_momentum_apply(psi: WaveFunction, params: ModelParams, route: str = "translation") -> WaveFunction:
    """``(beta / i pi)(U(h) - U(-h))`` with ``h = hbar pi / 2 beta``.

    ``route='translation'`` shifts the samples by whole nodes;
    ``route='spectral'`` multiplies by ``(2 beta / pi) sin(pi p / 2 beta)``.
    """
    grid = psi.grid
    h = params.hbar * np.pi / (2 * params.beta)
    shift = h / grid.spacing
    n = int(round(shift))
    if n < 1 or abs(shift - n) > 1e-9 * max(1.0, shift):
        raise InvalidArgument(f"translation step {h:g} is not a whole multiple of dx = {grid.spacing:g}")
    vals = psi.position().amplitudes
    if route == "translation":
        # U(h) psi(x) = psi(x + h)
        out = (params.beta / (1j * np.pi)) * (np.roll(vals, -n) - np.roll(vals, n))
    elif route == "spectral":
        mult = (2 * params.beta / np.pi) * np.sin(np.pi * grid.p_fft / (2 * params.beta))
        out = apply_multiplier(vals, grid, mult)
    else:
        raise InvalidArgument(f"unknown route {route!r}")
    return WaveFunction(grid, out)


def interval_mass(psi: WaveFunction, a: float, b: float) -> float:
    """Probability on the nodes with a <= x < b."""
    pos = psi.position()
    sel = (pos.grid.x >= a) & (pos.grid.x < b)
    return float(np.sum(np.abs(pos.amplitudes[sel]) ** 2) * pos.grid.spacing)


def bandlimited_from_momentum(grid: Grid1D, chi: np.ndarray) -> WaveFunction:
    return WaveFunction(grid, to_position_array(chi, grid))
