"""Eigenanalysis, perturbative level shifts and l_P convergence studies."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InvalidArgument, PreconditionViolation
from .grid import Grid1D, ModelParams, WaveFunction, spectral_derivative
from .hamiltonian import (
    HamiltonianVariant,
    _midpoint_potential,
    build_hamiltonian,
    gaussian_kernel_matrix,
    smeared_potential,
)
from .operators import OperatorMatrix
from .potentials import PotentialSpec, build_potential, second_derivative

HERMITIAN_TOL = 1e-10
MIN_SWEEP_RATIO = 8.0


@dataclass
class SpectrumResult:
    tag: str
    eigenvalues: np.ndarray
    eigenvectors: list
    residuals: np.ndarray
    operator_norm: float
    info: dict = field(default_factory=dict)

    def vector_matrix(self) -> np.ndarray:
        """Eigenvectors as columns, normalised so that sum |v|^2 dx = 1."""
        return np.column_stack([w.amplitudes for w in self.eigenvectors])


def _fix_phase(v):
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def diagonalize(op: OperatorMatrix, n_levels: int, non_hermitian_allowed: bool = False) -> SpectrumResult:
    """Lowest ``n_levels`` eigenpairs.

    Hermitian input (defect <= 1e-10) is symmetrised and handed to a dense
    symmetric solver. With ``non_hermitian_allowed`` a general solver is used
    and eigenvalues may be complex; they are sorted by real part.
    If the operator carries a ``subspace`` the problem is solved there.
    """
    H = op.entries
    grid = op.grid
    hermitian = op.hermiticity_defect <= HERMITIAN_TOL
    if not hermitian and not non_hermitian_allowed:
        raise PreconditionViolation(
            f"operator {op.tag!r} is not Hermitian (defect {op.hermiticity_defect:.3e}); "
            "pass non_hermitian_allowed=True for a complex spectrum")
    Q = op.subspace
    Hs = Q.conj().T @ H @ Q if Q is not None else H
    dim = Hs.shape[0]
    if not 1 <= n_levels <= dim:
        raise InvalidArgument(f"n_levels must be in [1, {dim}]")
    if hermitian:
        Hs = 0.5 * (Hs + Hs.conj().T)
        if np.iscomplexobj(Hs) and np.max(np.abs(Hs.imag)) == 0:
            Hs = Hs.real
        vals, vecs = sla.eigh(Hs, subset_by_index=[0, n_levels - 1])
    else:
        vals, vecs = sla.eig(Hs)
        order = np.argsort(vals.real, kind="stable")[:n_levels]
        vals, vecs = vals[order], vecs[:, order]
        vecs = vecs / np.linalg.norm(vecs, axis=0)
    if Q is not None:
        vecs = Q @ vecs
    vecs = np.column_stack([_fix_phase(vecs[:, i]) for i in range(vecs.shape[1])])
    residuals = np.linalg.norm(H @ vecs - vecs * vals[None, :], axis=0)
    scale = 1.0 / np.sqrt(grid.spacing)
    states = [WaveFunction(grid, vecs[:, i] * scale) for i in range(vecs.shape[1])]
    op_norm = float(np.linalg.norm(Hs, 2)) if dim <= 512 else float(np.max(np.abs(Hs).sum(axis=1)))
    return SpectrumResult(op.tag, vals, states, residuals, op_norm, dict(op.info))


def dirichlet_reference(half_width: float, n_interior: int, params: ModelParams, n_levels: int) -> np.ndarray:
    """Hard-wall levels on (-half_width, half_width) from a fourth-order stencil.

    Ghost points use the odd reflection psi(-x) = -psi(x) about each wall.
    """
    n = int(n_interior)
    h = 2 * half_width / (n + 1)
    c = params.hbar**2 / (2 * params.mass) / (12 * h**2)
    main = np.full(n, 30.0)
    main[0] = main[-1] = 29.0
    bands = np.zeros((3, n))
    bands[0, 2:] = 1.0
    bands[1, 1:] = -16.0
    bands[2] = main
    vals = sla.eig_banded(c * bands, eigvals_only=True, select="i", select_range=(0, n_levels - 1))
    return np.sort(vals)


def infinite_well_levels(half_width: float, params: ModelParams, n_levels: int) -> np.ndarray:
    n = np.arange(1, n_levels + 1)
    return n**2 * np.pi**2 * params.hbar**2 / (8 * params.mass * half_width**2)


def exterior_mass(psi: WaveFunction, half_width: float) -> float:
    pos = psi.position()
    out = np.abs(pos.grid.x) >= half_width
    return float(np.sum(np.abs(pos.amplitudes[out]) ** 2) * pos.grid.spacing)


def perturbative_shifts(spectrum_std: SpectrumResult, spec: PotentialSpec, params: ModelParams,
                        variant: str, form: str = "taylor") -> np.ndarray:
    """First-order level shifts of the Gaussian-smeared equations.

    Taylor form (smooth V), with the 1D smearing prefactor ``l_P^2 / 4``::

        midpoint:  (l_P^2/4) [ int |psi|^2 V''/4 dx - int V |psi'|^2 dx ]
        simple:    (l_P^2/4) int |psi|^2 V'' dx

    ``form='integral'`` evaluates ``<psi|W - V|psi>`` with the smeared
    potential operator W itself; it is used automatically for potentials
    with jumps, where the Taylor expansion does not exist.
    """
    variant = HamiltonianVariant.coerce(variant).tag
    if variant not in ("gaussian_midpoint", "gaussian_simple"):
        raise InvalidArgument(f"perturbative shifts exist for gaussian_midpoint/gaussian_simple, not {variant}")
    if form not in ("taylor", "integral"):
        raise InvalidArgument(f"unknown form {form!r}")
    if form == "taylor" and not spec.smooth:
        warnings.warn(f"{spec.kind} potential is discontinuous; the derivative formula is invalid "
                      "at the seam, using the integral form", stacklevel=2)
        form = "integral"
    grid = spectrum_std.eigenvectors[0].grid
    psis = spectrum_std.vector_matrix()
    dens = np.abs(psis) ** 2
    dx = grid.spacing
    pref = params.l_P**2 / 4
    if form == "taylor":
        vpp = second_derivative(spec, grid, params)
        term = np.sum(dens * vpp[:, None], axis=0) * dx
        if variant == "gaussian_simple":
            return pref * term
        v = build_potential(spec, grid, params)
        dpsi = spectral_derivative(psis.T, grid).T
        kin = np.sum(v[:, None] * np.abs(dpsi) ** 2, axis=0) * dx
        return pref * (term / 4 - kin)
    v = build_potential(spec, grid, params)
    if variant == "gaussian_simple":
        dv = smeared_potential(spec, grid, params) - v
        return np.sum(dens * dv[:, None], axis=0) * dx
    W = gaussian_kernel_matrix(grid, params.l_P) * _midpoint_potential(spec, grid, params)
    Wpsi = W @ psis
    return np.real(np.sum(psis.conj() * Wpsi, axis=0) - np.sum(dens * v[:, None], axis=0)) * dx


@dataclass
class ConvergenceResult:
    variant: str
    l_values: np.ndarray
    diag_shifts: np.ndarray          # (n_l, n_levels): E_mod - E_std
    formula_shifts: np.ndarray       # (n_l, n_levels)
    slope: float | None
    fit_residual: float | None
    monotone: bool


def convergence_study(variant, spec: PotentialSpec, params: ModelParams, l_values, grid: Grid1D,
                      n_levels: int = 1) -> ConvergenceResult:
    """Level shifts against l_P and the log-log slope of the ground-state shift.

    ``l_values`` needs at least four entries spanning a factor of eight or
    more (the octave-spaced sweep 0.2 .. 0.025 qualifies). ``l_P = 0``
    entries give an exactly zero shift and are left out of the fit.
    """
    variant = HamiltonianVariant.coerce(variant)
    l_values = np.asarray(l_values, float)
    pos = l_values[l_values > 0]
    if l_values.size < 4 or pos.size == 0 or pos.max() / pos.min() < MIN_SWEEP_RATIO:
        raise InvalidArgument(f"need >= 4 values of l_P spanning a factor >= {MIN_SWEEP_RATIO:g}")
    std = diagonalize(build_hamiltonian("standard", spec, grid, params), n_levels)
    diag, formula = [], []
    for l in l_values:
        if l == 0:
            diag.append(np.zeros(n_levels))
            formula.append(np.zeros(n_levels))
            continue
        p_l = params.replace(l_P=float(l))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            mod = diagonalize(build_hamiltonian(variant, spec, grid, p_l), n_levels)
        diag.append(mod.eigenvalues - std.eigenvalues)
        if variant.tag in ("gaussian_midpoint", "gaussian_simple"):
            formula.append(perturbative_shifts(std, spec, p_l, variant.tag))
        else:
            formula.append(np.full(n_levels, np.nan))
    diag = np.array(diag)
    formula = np.array(formula)
    sel = l_values > 0
    ls, mags = l_values[sel], np.abs(diag[sel, 0])
    order = np.argsort(ls)
    monotone = bool(np.all(np.diff(mags[order]) > 0)) and bool(np.all(mags > 0))
    slope = resid = None
    if monotone:
        coef, res, *_ = np.polyfit(np.log(ls), np.log(mags), 1, full=True)
        slope = float(coef[0])
        resid = float(np.sqrt(res[0] / ls.size)) if res.size else 0.0
    return ConvergenceResult(variant.label, l_values, diag, formula, slope, resid, monotone)
