"""Declarative potentials: wells, oscillators, their cutoff versions, tables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .grid import Grid1D, ModelParams

KINDS = ("free", "square_well", "cutoff_well", "harmonic", "cutoff_harmonic", "constant", "tabulated")


@dataclass(frozen=True)
class PotentialSpec:
    """A potential described by kind and parameters.

    ``cutoff_well`` has walls at ``beta^2 / 2m`` beyond ``|x| >= half_width``.
    ``cutoff_harmonic`` follows ``m w^2 x^2 / 2`` up to ``|x| = beta / (m w)``
    and stays on the plateau ``beta^2 / 2m`` beyond, so it is continuous at
    the seam. ``constant`` is a flat potential of height ``V0``.
    """

    kind: str
    half_width: float | None = None
    V0: float | None = None
    omega: float | None = None
    values: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown potential kind {self.kind!r}")
        if self.kind in ("square_well", "cutoff_well") and not (self.half_width and self.half_width > 0):
            raise InvalidArgument("well half_width must be > 0")
        if self.kind in ("square_well", "constant") and self.V0 is None:
            raise InvalidArgument(f"{self.kind} needs V0")
        if self.kind == "square_well" and self.V0 < 0:
            raise InvalidArgument("V0 must be >= 0")
        if self.kind in ("harmonic", "cutoff_harmonic") and not (self.omega and self.omega > 0):
            raise InvalidArgument("omega must be > 0")
        if self.kind == "tabulated":
            if self.values is None:
                raise InvalidArgument("tabulated potential needs values")
            object.__setattr__(self, "values", tuple(float(v) for v in np.ravel(self.values)))

    # convenience constructors
    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def square_well(cls, half_width, V0):
        return cls("square_well", half_width=half_width, V0=V0)

    @classmethod
    def cutoff_well(cls, half_width):
        return cls("cutoff_well", half_width=half_width)

    @classmethod
    def harmonic(cls, omega=1.0):
        return cls("harmonic", omega=omega)

    @classmethod
    def cutoff_harmonic(cls, omega=1.0):
        return cls("cutoff_harmonic", omega=omega)

    @classmethod
    def constant(cls, value):
        return cls("constant", V0=value)

    @classmethod
    def tabulated(cls, values):
        return cls("tabulated", values=tuple(np.ravel(values)))

    @property
    def smooth(self) -> bool:
        """False when the potential has jumps (Taylor-based formulas break)."""
        return self.kind in ("free", "harmonic", "constant")

    def wall_height(self, params: ModelParams) -> float:
        if self.kind == "square_well":
            return float(self.V0)
        return params.beta**2 / (2 * params.mass)

    def evaluate(self, x, params: ModelParams, grid: Grid1D | None = None) -> np.ndarray:
        """V at arbitrary points. Tabulated values are linearly interpolated
        (periodically) and therefore need the grid they were sampled on."""
        x = np.asarray(x, dtype=float)
        m = params.mass
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "constant":
            return np.full_like(x, self.V0)
        if self.kind in ("square_well", "cutoff_well"):
            return np.where(np.abs(x) >= self.half_width, self.wall_height(params), 0.0)
        if self.kind == "harmonic":
            return 0.5 * m * self.omega**2 * x**2
        if self.kind == "cutoff_harmonic":
            seam = params.beta / (m * self.omega)
            return np.where(np.abs(x) >= seam, params.beta**2 / (2 * m), 0.5 * m * self.omega**2 * x**2)
        if grid is None:
            raise InvalidArgument("tabulated potential needs its grid to be evaluated off-node")
        vals = np.asarray(self.values)
        if vals.size != grid.n_points:
            raise InvalidArgument(f"tabulated potential has {vals.size} values, grid has {grid.n_points}")
        return np.interp(x, grid.x, vals, period=grid.length)


def build_potential(spec: PotentialSpec, grid: Grid1D, params: ModelParams) -> np.ndarray:
    """Potential values on the grid nodes."""
    if spec.kind == "tabulated":
        vals = np.asarray(spec.values, dtype=float)
        if vals.size != grid.n_points:
            raise InvalidArgument(f"tabulated potential has {vals.size} values, grid has {grid.n_points}")
        return vals.copy()
    return spec.evaluate(grid.x, params)


def second_derivative(spec: PotentialSpec, grid: Grid1D, params: ModelParams) -> np.ndarray:
    """V'' on the nodes by a central difference with step dx."""
    h = grid.spacing
    if spec.kind == "tabulated":
        v = build_potential(spec, grid, params)
        return (np.roll(v, -1) - 2 * v + np.roll(v, 1)) / h**2
    x = grid.x
    return (spec.evaluate(x + h, params) - 2 * spec.evaluate(x, params) + spec.evaluate(x - h, params)) / h**2


def _int_quadratic_exp(c0, c2, a, b, k):
    """Integral of (c0 + c2 x^2) exp(-i k x) over [a, b]."""
    if k == 0:
        return c0 * (b - a) + c2 * (b**3 - a**3) / 3
    def anti(x):
        e = np.exp(-1j * k * x)
        return c0 * e * 1j / k + c2 * e * (1j * x**2 / k + 2 * x / k**2 - 2j / k**3)
    return anti(b) - anti(a)


def fourier_coefficients(spec: PotentialSpec, grid: Grid1D, params: ModelParams, q: np.ndarray) -> np.ndarray:
    """``(1/L) * integral V(x) exp(-i q x / hbar) dx`` over one period.

    ``q`` must be differences of lattice momenta. Jumps are integrated
    exactly for the well and oscillator kinds; tabulated potentials use the
    lattice sum of their node values.
    """
    q = np.asarray(q, dtype=float)
    L, hbar = grid.length, grid.hbar
    a, b = grid.x_min, grid.x_max
    m = params.mass
    out = np.zeros(q.shape, dtype=complex)
    k_vals, inverse = np.unique(np.round(q / grid.dp).astype(int), return_inverse=True)
    ks = k_vals * grid.dp / hbar
    coeff = np.zeros(ks.shape, dtype=complex)
    for idx, k in enumerate(ks):
        if spec.kind == "free":
            c = 0.0
        elif spec.kind == "constant":
            c = spec.V0 * L if k_vals[idx] == 0 else 0.0
        elif spec.kind in ("square_well", "cutoff_well"):
            l = spec.half_width
            if not (a <= -l and l <= b):
                raise InvalidArgument("well must fit inside the domain")
            W = spec.wall_height(params)
            c = (W * L if k_vals[idx] == 0 else 0.0) - W * _int_quadratic_exp(1.0, 0.0, -l, l, k)
        elif spec.kind == "harmonic":
            c = _int_quadratic_exp(0.0, 0.5 * m * spec.omega**2, a, b, k)
        elif spec.kind == "cutoff_harmonic":
            s = params.beta / (m * spec.omega)
            W = params.beta**2 / (2 * m)
            if s >= min(-a, b):
                c = _int_quadratic_exp(0.0, 0.5 * m * spec.omega**2, a, b, k)
            else:
                c = (W * L if k_vals[idx] == 0 else 0.0) + _int_quadratic_exp(-W, 0.5 * m * spec.omega**2, -s, s, k)
        else:
            v = build_potential(spec, grid, params)
            c = np.sum(v * np.exp(-1j * k * grid.x)) * grid.spacing
        coeff[idx] = c / L
    out[...] = coeff[inverse].reshape(q.shape)
    return out
