"""Uniform periodic 1D grids, position/momentum transforms and observables.

Conventions
-----------
Nodes are ``x_j = x_min + j * dx`` for ``j = 0 .. N-1`` with
``dx = (x_max - x_min) / N``; the grid is periodic, so ``x_max`` itself is
not a node. Momentum amplitudes are the lattice version of

    chi(p) = (2 pi hbar)^(-1/2) * integral dx psi(x) exp(-i p x / hbar)

sampled on ``p_k = 2 pi hbar k / (N dx)``, stored in ascending order of p
(``numpy.fft.fftshift`` order). All integrals are Riemann sums.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidArgument, InvalidState

POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class ModelParams:
    """Physical constants and deformation scales.

    ``beta`` is the hard momentum cutoff. Left as ``None`` it follows
    ``hbar / l_P``; :meth:`replace` keeps that link when ``l_P`` changes.
    ``l_P = 0`` is accepted only with an explicit ``beta`` and means the
    undeformed limit for the Gaussian smearing kernels.
    """

    hbar: float = 1.0
    mass: float = 1.0
    l_P: float = 0.1
    beta: float | None = None
    beta_derived: bool = field(default=False, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("hbar", "mass"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise InvalidArgument(f"{name} must be finite and > 0, got {val!r}")
        if not (np.isfinite(self.l_P) and self.l_P >= 0):
            raise InvalidArgument(f"l_P must be finite and >= 0, got {self.l_P!r}")
        if self.beta is None:
            if self.l_P == 0:
                raise InvalidArgument("l_P = 0 requires an explicit beta")
            object.__setattr__(self, "beta", self.hbar / self.l_P)
            object.__setattr__(self, "beta_derived", True)
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise InvalidArgument(f"beta must be finite and > 0, got {self.beta!r}")

    @property
    def k_P(self) -> float:
        return 1.0 / self.l_P if self.l_P > 0 else np.inf

    def replace(self, **changes) -> "ModelParams":
        if self.beta_derived and "beta" not in changes:
            changes["beta"] = None
        kw = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}
        kw.update(changes)
        return ModelParams(**kw)


@dataclass(frozen=True)
class Grid1D:
    n_points: int
    x_min: float
    x_max: float
    hbar: float = 1.0

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @cached_property
    def x(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.n_points)

    @cached_property
    def p_fft(self) -> np.ndarray:
        """Momenta in FFT order."""
        return 2 * np.pi * self.hbar * np.fft.fftfreq(self.n_points, self.spacing)

    @cached_property
    def momentum_grid(self) -> np.ndarray:
        """Momenta in ascending order, spanning [-pi hbar/dx, pi hbar/dx)."""
        return np.fft.fftshift(self.p_fft)

    @property
    def dp(self) -> float:
        return 2 * np.pi * self.hbar / self.length

    @property
    def nyquist_momentum(self) -> float:
        return np.pi * self.hbar / self.spacing

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(-i p x_min / hbar) in FFT order; makes the DFT refer to absolute x
        return np.exp(-1j * self.p_fft * self.x_min / self.hbar)


def make_grid(n_points: int, x_min: float, x_max: float, hbar: float = 1.0) -> Grid1D:
    """Build a periodic grid. ``n_points`` must be a power of two >= 16."""
    n = int(n_points)
    if n != n_points or n < 16 or n & (n - 1):
        raise InvalidArgument(f"n_points must be a power of two >= 16, got {n_points!r}")
    if not (np.isfinite(x_min) and np.isfinite(x_max)) or not x_max > x_min:
        raise InvalidArgument(f"degenerate domain [{x_min}, {x_max}]")
    if not hbar > 0:
        raise InvalidArgument("hbar must be > 0")
    return Grid1D(n, float(x_min), float(x_max), float(hbar))


@dataclass
class WaveFunction:
    """Complex amplitudes on a grid, in position or momentum representation.

    Momentum-space amplitudes are ordered like ``grid.momentum_grid``.
    """

    grid: Grid1D
    amplitudes: np.ndarray
    representation: str = POSITION

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid.n_points,):
            raise InvalidArgument(
                f"amplitudes must have shape ({self.grid.n_points},), got {amp.shape}")
        if not np.all(np.isfinite(amp)):
            raise InvalidState("amplitudes must be finite")
        if self.representation not in (POSITION, MOMENTUM):
            raise InvalidArgument(f"unknown representation {self.representation!r}")
        self.amplitudes = amp

    @property
    def measure(self) -> float:
        return self.grid.spacing if self.representation == POSITION else self.grid.dp

    def norm(self) -> float:
        """L2 norm (not squared)."""
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.measure))

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0:
            raise InvalidState("cannot normalize a zero state")
        return WaveFunction(self.grid, self.amplitudes / n, self.representation)

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> with the quadrature measure of the representation."""
        if other.representation != self.representation:
            other = transform(other, _direction_to(self.representation))
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.measure)

    def with_amplitudes(self, amplitudes) -> "WaveFunction":
        return WaveFunction(self.grid, amplitudes, self.representation)

    def position(self) -> "WaveFunction":
        if self.representation == POSITION:
            return self
        return transform(self, "momentum-to-position")

    def momentum(self) -> "WaveFunction":
        if self.representation == MOMENTUM:
            return self
        return transform(self, "position-to-momentum")


def _direction_to(rep):
    return "momentum-to-position" if rep == POSITION else "position-to-momentum"


def to_momentum_array(values: np.ndarray, grid: Grid1D) -> np.ndarray:
    scale = grid.spacing / np.sqrt(2 * np.pi * grid.hbar)
    return np.fft.fftshift(scale * grid._phase * np.fft.fft(values))


def to_position_array(chi: np.ndarray, grid: Grid1D) -> np.ndarray:
    scale = grid.dp * grid.n_points / np.sqrt(2 * np.pi * grid.hbar)
    return scale * np.fft.ifft(np.fft.ifftshift(chi) / grid._phase)


def transform(psi: WaveFunction, direction: str) -> WaveFunction:
    """Unitary lattice Fourier transform between the two representations."""
    if direction == "position-to-momentum":
        if psi.representation != POSITION:
            raise InvalidArgument("input is not in the position representation")
        return WaveFunction(psi.grid, to_momentum_array(psi.amplitudes, psi.grid), MOMENTUM)
    if direction == "momentum-to-position":
        if psi.representation != MOMENTUM:
            raise InvalidArgument("input is not in the momentum representation")
        return WaveFunction(psi.grid, to_position_array(psi.amplitudes, psi.grid), POSITION)
    raise InvalidArgument(f"unknown direction {direction!r}")


def apply_multiplier(values: np.ndarray, grid: Grid1D, multiplier: np.ndarray) -> np.ndarray:
    """Multiply position-space samples by ``multiplier(p)`` in momentum space.

    ``multiplier`` is given in FFT order (matching ``grid.p_fft``). Works on
    the last axis so stacks of states can be filtered at once.
    """
    return np.fft.ifft(multiplier * np.fft.fft(values, axis=-1), axis=-1)


def spectral_derivative(values: np.ndarray, grid: Grid1D, order: int = 1) -> np.ndarray:
    k = grid.p_fft / grid.hbar
    out = apply_multiplier(values, grid, (1j * k) ** order)
    return out.real if np.isrealobj(values) else out


@dataclass(frozen=True)
class Observables:
    norm: float
    mean_x: float
    delta_x: float
    mean_p: float
    delta_p: float
    spread_l: float

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _moments(values, weights, measure):
    dens = np.abs(weights) ** 2
    total = np.sum(dens) * measure
    if total == 0:
        raise InvalidState("observables of a zero-norm state are undefined")
    mean = np.sum(values * dens) * measure / total
    var = np.sum((values - mean) ** 2 * dens) * measure / total
    return total, mean, np.sqrt(var)


def observables(psi: WaveFunction) -> Observables:
    """Norm and first two moments of position and momentum.

    ``norm`` is the squared L2 norm. Moments are normalised by it, so the
    input need not be normalised. For a Gaussian ``exp(-x^2 / 2 sigma^2)``
    this gives ``delta_x = sigma / sqrt(2)``.
    """
    pos = psi.position()
    mom = psi.momentum()
    grid = psi.grid
    norm, mean_x, dx = _moments(grid.x, pos.amplitudes, grid.spacing)
    _, mean_p, dp = _moments(grid.momentum_grid, mom.amplitudes, grid.dp)
    return Observables(float(norm), float(mean_x), float(dx), float(mean_p), float(dp), float(dx))


def gaussian(grid: Grid1D, x0: float = 0.0, sigma: float = 1.0, p0: float = 0.0) -> WaveFunction:
    """Normalised ``(pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 2 sigma^2 + i p0 x / hbar)``."""
    x = grid.x
    amp = (np.pi * sigma**2) ** -0.25 * np.exp(-((x - x0) ** 2) / (2 * sigma**2) + 1j * p0 * x / grid.hbar)
    return WaveFunction(grid, amp)


def plane_wave(grid: Grid1D, p0: float) -> WaveFunction:
    """Unit-norm plane wave; ``p0`` should sit on the momentum lattice."""
    amp = np.exp(1j * p0 * grid.x / grid.hbar) / np.sqrt(grid.length)
    return WaveFunction(grid, amp)


def boundary_mass(psi: WaveFunction, fraction: float = 0.05) -> float:
    """Probability in the outer ``fraction`` of the domain on each side.

    Used to assert that periodic wrap-around is negligible.
    """
    pos = psi.position()
    n = max(1, int(round(fraction * psi.grid.n_points)))
    dens = np.abs(pos.amplitudes) ** 2
    return float((dens[:n].sum() + dens[-n:].sum()) / dens.sum())
