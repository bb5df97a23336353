"""Gaussian coarse-graining ``B = exp(l_P^2 d^2/dx^2 / 4)`` and its inversion.

Two inverses are offered. ``spectral`` multiplies the retained modes by
``exp(+k^2 l_P^2 / 4)``. ``hermite_series`` sums

    psi = psi_s + sum_{n=1}^{n_max} ((-l^2/4)^n / n!) (2^n - 1) (psi_s * f^(2n))

where ``f^(2n)(xi) = l^(-2n) H_2n(xi / l) f(xi)`` is the 2n-th derivative of
the smearing Gaussian. In Fourier space the ``n``-th term multiplies by
``a^n (2^n - 1) exp(-a) / n!`` with ``a = k^2 l^2 / 4``, and the full series
sums to ``exp(a)``. The first term is ``-(l^2/4) (f * psi_s)''``, which is
``-(l^2/4) psi_s''`` to leading order.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from .errors import IllPosedInput, InvalidArgument
from .grid import Grid1D, ModelParams, WaveFunction, apply_multiplier

BLOWUP_FACTOR = 1e3
SMOOTH_RANGE = 8.0      # direct smoothing kernel support, in units of l_P
SERIES_RANGE = 12.0     # Hermite kernels decay more slowly


def _check_domain(grid: Grid1D, l: float):
    if l <= 0:
        raise InvalidArgument("smoothing needs l_P > 0")
    if grid.length < 16 * l:
        raise InvalidArgument(f"domain length {grid.length:g} is not >> l_P = {l:g}")
    if l < 2 * grid.spacing:
        warnings.warn(f"l_P = {l:g} is under-resolved by dx = {grid.spacing:g}", stacklevel=3)


def _offsets(grid: Grid1D, reach: float) -> np.ndarray:
    kmax = min(int(np.floor(reach / grid.spacing)), grid.n_points // 2 - 1)
    return np.arange(-kmax, kmax + 1) * grid.spacing


def gaussian_smooth(psi: WaveFunction, params: ModelParams, method: str = "spectral") -> WaveFunction:
    """Convolve with ``(pi l_P^2)^(-1/2) exp(-xi^2 / l_P^2)``.

    ``spectral`` multiplies lattice modes by ``exp(-k^2 l_P^2 / 4)``;
    ``direct`` sums the sampled kernel over ``|xi| <= 8 l_P`` with periodic
    wrap-around.
    """
    grid = psi.grid
    l = params.l_P
    _check_domain(grid, l)
    vals = psi.position().amplitudes
    if method == "spectral":
        k = grid.p_fft / grid.hbar
        out = apply_multiplier(vals, grid, np.exp(-(k**2) * l**2 / 4))
    elif method == "direct":
        xi = _offsets(grid, SMOOTH_RANGE * l)
        w = grid.spacing * np.exp(-(xi**2) / l**2) / np.sqrt(np.pi * l**2)
        out = convolve1d(vals.real, w, mode="wrap") + 1j * convolve1d(vals.imag, w, mode="wrap")
    else:
        raise InvalidArgument(f"unknown smoothing method {method!r}")
    return WaveFunction(grid, out)


@dataclass(frozen=True)
class DeconvolutionConfig:
    """``k_max`` is a momentum (same units as p); ``None`` means the model cutoff beta."""

    method: str = "spectral"
    k_max: float | None = None
    n_max: int = 4
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.method not in ("spectral", "hermite_series"):
            raise InvalidArgument(f"unknown deconvolution method {self.method!r}")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidArgument("n_max must be an integer >= 1")
        if self.k_max is not None and not self.k_max > 0:
            raise InvalidArgument("k_max must be > 0")
        if not self.tolerance >= 0:
            raise InvalidArgument("tolerance must be >= 0")


def hermite_values(n_max: int, u: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomials ``H_0 .. H_n_max`` at ``u`` by the three-term recurrence."""
    u = np.asarray(u, float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2 * u
    for m in range(1, n_max):
        out[m + 1] = 2 * u * out[m] - 2 * m * out[m - 1]
    return out


def gaussian_derivative_kernel(xi: np.ndarray, l: float, order: int) -> np.ndarray:
    """``d^order/dxi^order`` of the smearing Gaussian via Rodrigues' formula."""
    u = np.asarray(xi, float) / l
    f = np.exp(-(u**2)) / np.sqrt(np.pi * l**2)
    return (-1) ** order * hermite_values(order, u)[order] * f / l**order


def series_terms(psi_s: WaveFunction, params: ModelParams, n_max: int) -> np.ndarray:
    """The individual correction terms ``n = 1 .. n_max`` of the inversion series."""
    grid = psi_s.grid
    l = params.l_P
    vals = psi_s.position().amplitudes
    xi = _offsets(grid, SERIES_RANGE * l)
    n_pts = grid.n_points
    kernel = np.zeros(n_pts)
    idx = np.round(xi / grid.spacing).astype(int) % n_pts
    spec_in = np.fft.fft(vals)
    terms = []
    fact = 1.0
    for n in range(1, n_max + 1):
        fact *= n
        kernel[:] = 0.0
        kernel[idx] = grid.spacing * gaussian_derivative_kernel(xi, l, 2 * n)
        conv = np.fft.ifft(spec_in * np.fft.fft(kernel))
        terms.append((-(l**2) / 4) ** n / fact * (2**n - 1) * conv)
    return np.array(terms)


def deconvolve(psi_s: WaveFunction, params: ModelParams, cfg: DeconvolutionConfig | None = None) -> WaveFunction:
    """Undo :func:`gaussian_smooth` approximately.

    Raises :class:`IllPosedInput` when the result is more than 1e3 times
    larger in norm than the input: the inverse is then dominated by
    amplified short-wavelength content.
    """
    cfg = cfg or DeconvolutionConfig()
    grid = psi_s.grid
    l = params.l_P
    _check_domain(grid, l)
    vals = psi_s.position().amplitudes
    if cfg.method == "spectral":
        k_max = params.beta if cfg.k_max is None else cfg.k_max
        if k_max > grid.nyquist_momentum * (1 + 1e-12):
            raise InvalidArgument(f"k_max = {k_max:g} exceeds the grid Nyquist momentum {grid.nyquist_momentum:g}")
        keep = np.abs(grid.p_fft) <= k_max
        spec = np.fft.fft(vals)
        total = np.linalg.norm(spec)
        dropped = np.linalg.norm(spec[~keep]) / total if total > 0 else 0.0
        if dropped > cfg.tolerance:
            warnings.warn(f"relative spectral mass {dropped:.2e} above k_max is discarded", stacklevel=2)
        k = grid.p_fft / grid.hbar
        mult = np.where(keep, np.exp(np.minimum(k**2 * l**2 / 4, 700.0)), 0.0)
        out = np.fft.ifft(mult * spec)
    else:
        out = vals + series_terms(psi_s, params, cfg.n_max).sum(axis=0)
    n_in = np.linalg.norm(vals)
    n_out = np.linalg.norm(out)
    if n_out > BLOWUP_FACTOR * n_in:
        raise IllPosedInput(
            f"deconvolution amplified the norm by {n_out / n_in:.3e} (> {BLOWUP_FACTOR:g}); "
            "the input carries too much short-wavelength content")
    return WaveFunction(grid, out)
