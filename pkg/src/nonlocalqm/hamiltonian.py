"""Dense matrices for every Hamiltonian variant.

Kinetic energy is always the spectral ``-hbar^2 d^2/dx^2 / 2m`` on the
periodic grid. Potential terms by tag:

``standard``           diag V
``erste``              P (T + V), P the lattice band projector (non-Hermitian)
``zweite``             T + P V (non-Hermitian)
``hermitisch1``        K(x, y) (V(x) + V(y)) / 2
``hermitisch2``        K(x, y) V((x + y) / 2)
``gaussian_midpoint``  f(x - y) V((x + y) / 2)
``gaussian_simple``    diag (f * V)
``weighted_hybrid``    w1 * gaussian_midpoint + (1 - w1) * diag(int f(xi) V(x - xi/2))

K is the sinc kernel, f the 1D Gaussian ``(pi l_P^2)^(-1/2) exp(-xi^2 / l_P^2)``.

With ``band_restricted=True`` the sinc family is built on the band
subspace |p| <= beta only. There ``erste``, re-projected ``hermitisch1`` and
re-projected ``hermitisch2`` all reduce to ``T + P V P``, which is what gets
built, using exact Fourier coefficients of V so that discontinuous walls
carry no grid-resolution error.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bandlimit import _check_nyquist, band_mask, sinc_kernel, sinc_kernel_matrix
from .errors import InvalidArgument
from .grid import Grid1D, ModelParams, WaveFunction, observables
from .operators import OperatorMatrix
from .potentials import PotentialSpec, build_potential, fourier_coefficients

SINC_TAGS = ("erste", "zweite", "hermitisch1", "hermitisch2")
GAUSS_TAGS = ("gaussian_midpoint", "gaussian_simple", "weighted_hybrid")
TAGS = ("standard",) + SINC_TAGS + GAUSS_TAGS
HERMITIAN_TAGS = ("standard", "hermitisch1", "hermitisch2") + GAUSS_TAGS

# Gaussian kernels are cut at |xi| > KERNEL_RANGE * l_P (relative tail < 1e-27)
KERNEL_RANGE = 8.0


@dataclass(frozen=True)
class HamiltonianVariant:
    tag: str
    w1: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InvalidArgument(f"unknown variant {self.tag!r}; expected one of {TAGS}")
        if self.tag == "weighted_hybrid":
            if self.w1 is None or not 0 <= self.w1 <= 1:
                raise InvalidArgument("weighted_hybrid needs w1 in [0, 1]")

    @classmethod
    def coerce(cls, v) -> "HamiltonianVariant":
        return v if isinstance(v, cls) else cls(v)

    @property
    def label(self) -> str:
        return self.tag if self.w1 is None else f"{self.tag}(w1={self.w1:g})"


@dataclass(frozen=True)
class WeightPolicy:
    """How the nonlocal weight w1 of the hybrid equation is chosen.

    ``fixed`` uses ``w1`` as given. ``spread_rule`` uses
    ``min(1, (l_P / l)^alpha)`` with ``l`` the position spread of a state.
    """

    mode: str = "fixed"
    w1: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.mode not in ("fixed", "spread_rule"):
            raise InvalidArgument(f"unknown weight mode {self.mode!r}")
        if self.mode == "fixed" and not 0 <= self.w1 <= 1:
            raise InvalidArgument("w1 must lie in [0, 1]")
        if self.alpha < 0:
            raise InvalidArgument("alpha must be >= 0")

    def weights(self, params: ModelParams, spread: float | None = None) -> tuple[float, float]:
        if self.mode == "fixed":
            w1 = float(self.w1)
        else:
            if spread is None or spread <= 0:
                raise InvalidArgument("spread_rule needs a positive spread")
            w1 = float(min(1.0, (params.l_P / spread) ** self.alpha))
        return w1, 1.0 - w1

    def resolve(self, psi: WaveFunction | None, params: ModelParams) -> HamiltonianVariant:
        spread = observables(psi).spread_l if psi is not None else None
        return HamiltonianVariant("weighted_hybrid", self.weights(params, spread)[0])


def kinetic_matrix(grid: Grid1D, params: ModelParams) -> np.ndarray:
    col = np.fft.ifft(grid.p_fft**2 / (2 * params.mass)).real
    return _circulant(col)


def projector_matrix(grid: Grid1D, params: ModelParams) -> np.ndarray:
    return _circulant(np.fft.ifft(band_mask(grid, params).astype(float)).real)


def _circulant(col):
    n = col.size
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def gaussian_weights(grid: Grid1D, l: float) -> tuple[np.ndarray, np.ndarray]:
    """Integer offsets ``k`` and normalised weights ``dx f(k dx) / Z``.

    ``Z`` is the lattice sum of ``dx f``, so the weights add up to one and a
    kernel much narrower than dx degenerates to the identity.
    """
    if l == 0:
        return np.array([0]), np.array([1.0])
    kmax = int(np.floor(KERNEL_RANGE * l / grid.spacing))
    k = np.arange(-kmax, kmax + 1)
    w = np.exp(-((k * grid.spacing) ** 2) / l**2)
    return k, w / w.sum()


def gaussian_kernel_matrix(grid: Grid1D, l: float) -> np.ndarray:
    k, w = gaussian_weights(grid, l)
    kmax = k[-1]
    n = grid.n_points
    diff = np.arange(n)[:, None] - np.arange(n)[None, :]
    inside = np.abs(diff) <= kmax
    return np.where(inside, w[np.clip(diff + kmax, 0, 2 * kmax)], 0.0)


def smeared_potential(spec: PotentialSpec, grid: Grid1D, params: ModelParams, fraction: float = 1.0) -> np.ndarray:
    """``sum_k w_k V(x - fraction * k dx)``: the lattice version of
    ``integral f(xi) V(x - fraction * xi) dxi``."""
    k, w = gaussian_weights(grid, params.l_P)
    x = grid.x[:, None] - fraction * k[None, :] * grid.spacing
    return spec.evaluate(x, params, grid) @ w


def _midpoint_potential(spec, grid, params):
    mid = 0.5 * (grid.x[:, None] + grid.x[None, :])
    return spec.evaluate(mid, params, grid)


def _check_gaussian(grid, params):
    if grid.length < 16 * params.l_P:
        raise InvalidArgument(f"domain length {grid.length:g} is not >> l_P = {params.l_P:g}")
    if 0 < params.l_P < 2 * grid.spacing:
        warnings.warn(f"l_P = {params.l_P:g} is under-resolved by dx = {grid.spacing:g}", stacklevel=3)


def band_basis(grid: Grid1D, params: ModelParams):
    """Lattice plane waves with |p| <= beta as orthonormal columns, and their momenta."""
    p = grid.p_fft[band_mask(grid, params)]
    return np.exp(1j * np.outer(grid.x, p) / grid.hbar) / np.sqrt(grid.n_points), p


def band_restricted_hamiltonian(spec, grid, params):
    q_basis, p = band_basis(grid, params)
    h_band = fourier_coefficients(spec, grid, params, np.subtract.outer(p, p))
    h_band = h_band + np.diag(p**2 / (2 * params.mass))
    entries = q_basis @ h_band @ q_basis.conj().T
    if np.max(np.abs(entries.imag)) <= 1e-12 * max(1.0, np.max(np.abs(entries.real))):
        entries = entries.real
    return entries, q_basis, h_band


def build_hamiltonian(variant, spec: PotentialSpec, grid: Grid1D, params: ModelParams, *,
                      kernel: str = "continuum", reproject: bool = False,
                      band_restricted: bool = False) -> OperatorMatrix:
    """Dense matrix of the requested variant on ``grid``.

    ``kernel`` selects the continuum or periodised sinc kernel for
    ``hermitisch1/2``; ``reproject`` sandwiches their potential term between
    band projectors. ``band_restricted`` is described in the module docstring.
    """
    variant = HamiltonianVariant.coerce(variant)
    tag = variant.tag
    if kernel not in ("continuum", "periodic"):
        raise InvalidArgument(f"unknown kernel {kernel!r}")
    if tag in SINC_TAGS:
        _check_nyquist(grid, params)
    if tag in GAUSS_TAGS:
        _check_gaussian(grid, params)
    info = {"variant": variant.label, "kernel": kernel, "reproject": reproject,
            "band_restricted": band_restricted}

    if band_restricted:
        if tag == "zweite" or tag not in SINC_TAGS:
            raise InvalidArgument(f"band_restricted build is defined for erste/hermitisch1/hermitisch2, not {tag}")
        entries, q, _ = band_restricted_hamiltonian(spec, grid, params)
        return OperatorMatrix(entries, tag, grid, subspace=q, info=info)

    T = kinetic_matrix(grid, params)
    v = build_potential(spec, grid, params)
    if tag == "standard":
        H = T + np.diag(v)
    elif tag == "erste":
        H = projector_matrix(grid, params) @ (T + np.diag(v))
    elif tag == "zweite":
        H = T + projector_matrix(grid, params) * v[None, :]
    elif tag in ("hermitisch1", "hermitisch2"):
        if kernel == "continuum":
            K = grid.spacing * sinc_kernel(grid.x, grid.x, params)
        else:
            K = sinc_kernel_matrix(grid, params, periodic=True).entries
        if tag == "hermitisch1":
            W = K * 0.5 * (v[:, None] + v[None, :])
        else:
            W = K * _midpoint_potential(spec, grid, params)
        if reproject:
            P = projector_matrix(grid, params)
            W = P @ W @ P
        H = T + W
    elif tag == "gaussian_midpoint":
        H = T + gaussian_kernel_matrix(grid, params.l_P) * _midpoint_potential(spec, grid, params)
    elif tag == "gaussian_simple":
        H = T + np.diag(smeared_potential(spec, grid, params))
    else:
        w1 = variant.w1
        local = np.diag(smeared_potential(spec, grid, params, fraction=0.5))
        if w1 == 0:
            H = T + local
        else:
            nonlocal_ = gaussian_kernel_matrix(grid, params.l_P) * _midpoint_potential(spec, grid, params)
            H = T + (nonlocal_ if w1 == 1 else w1 * nonlocal_ + (1 - w1) * local)
    return OperatorMatrix(H, tag, grid, info=info)


def potential_operator(op: OperatorMatrix, params: ModelParams) -> np.ndarray:
    """The potential part of a built Hamiltonian (entries minus kinetic)."""
    return op.entries - kinetic_matrix(op.grid, params)


def well_depth_sweep(half_width: float, grid: Grid1D, params: ModelParams,
                     factors=(10.0, 100.0, 1000.0), n_levels: int = 1) -> dict:
    """Band-limited ground energies for square wells of depth ``factor * beta^2 / 2m``.

    A band-limited state cannot vanish outside the well, so the energies keep
    growing with the wall instead of settling at the hard-wall values.
    """
    from .spectra import diagonalize

    base = params.beta**2 / (2 * params.mass)
    out = {}
    for fac in factors:
        spec = PotentialSpec.square_well(half_width, fac * base)
        op = build_hamiltonian("hermitisch2", spec, grid, params, band_restricted=True)
        out[float(fac)] = diagonalize(op, n_levels).eigenvalues
    return out
