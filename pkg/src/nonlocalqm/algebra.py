"""Momentum reparametrisations P = f(p) and the deformed commutators they induce.

In the momentum representation the deformed momentum acts as multiplication
by P, the position operator is ``X = i hbar g(P) d/dP`` and the scalar
product carries the weight ``w(P) = (f^-1)'(P)``. For a map derived
consistently, ``g(P) = f'(f^-1(P))`` and ``[X, P] = i hbar g(P)``.

Maps
----
``tan``       P = (2 beta / pi) tan(pi p / 2 beta), g = 1 + pi^2 P^2 / 4 beta^2
``tanh``      p = beta tanh(P / beta),             g = 1 / (1 - tanh^2(P / beta))
``sin``       P = (2 beta / pi) sin(pi p / 2 beta)
``identity``  P = p (undeformed control)

For ``sin`` two conventions exist. ``derived`` uses
``g = sqrt(1 - pi^2 P^2 / 4 beta^2)`` on ``|P| < 2 beta / pi``. ``stated``
(the default) uses ``g = sqrt(1 - pi^2 P^2 / beta^2)`` restricted to
``|P| < beta / pi``, which is the form commonly quoted for this algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgument, PreconditionViolation
from .grid import ModelParams, WaveFunction

MAP_TAGS = ("tan", "tanh", "sin", "identity")
CONVENTIONS = ("stated", "derived")

# central first-derivative stencils, offsets 1..order/2 (antisymmetric)
_FD_WEIGHTS = {
    2: [1 / 2],
    4: [2 / 3, -1 / 12],
    6: [3 / 4, -3 / 20, 1 / 60],
    8: [4 / 5, -1 / 5, 4 / 105, -1 / 280],
}


@dataclass(frozen=True)
class DeformationMap:
    tag: str
    beta: float
    forward: Callable
    inverse: Callable
    derivative: Callable            # f'(p)
    position_factor: Callable       # g(P) in X = i hbar g(P) d/dP
    measure_weight: Callable        # (f^-1)'(P)
    p_bound: float                  # valid |p| < p_bound
    P_bound: float                  # valid |P| < P_bound
    convention: str = "derived"

    def commutator(self, P) -> np.ndarray:
        """Predicted ``C(P)`` in ``[X, P] = i hbar C(P)``; rejects values outside the domain."""
        P = self.check_P(P)
        return self.position_factor(P)

    def check_P(self, P) -> np.ndarray:
        P = np.asarray(P, float)
        if np.any(~np.isfinite(P)) or np.any(np.abs(P) >= self.P_bound):
            raise InvalidArgument(f"{self.tag} map: deformed momentum outside |P| < {self.P_bound:g}")
        return P

    def check_p(self, p) -> np.ndarray:
        p = np.asarray(p, float)
        if np.any(~np.isfinite(p)) or np.any(np.abs(p) >= self.p_bound):
            raise InvalidArgument(f"{self.tag} map: momentum outside |p| < {self.p_bound:g}")
        return p

    def kinetic(self, P, mass: float = 1.0) -> np.ndarray:
        """``p^2 / 2m`` written through P, i.e. ``f^-1(P)^2 / 2m``."""
        return self.inverse(self.check_P(P)) ** 2 / (2 * mass)


def make_map(tag: str, params: ModelParams, convention: str = "stated") -> DeformationMap:
    if tag not in MAP_TAGS:
        raise InvalidArgument(f"unknown map {tag!r}; expected one of {MAP_TAGS}")
    if convention not in CONVENTIONS:
        raise InvalidArgument(f"unknown convention {convention!r}")
    b = params.beta
    c = np.pi / (2 * b)
    if tag == "tan":
        return DeformationMap(
            tag, b,
            forward=lambda p: np.tan(c * p) / c,
            inverse=lambda P: np.arctan(c * P) / c,
            derivative=lambda p: 1.0 / np.cos(c * p) ** 2,
            position_factor=lambda P: 1 + (c * P) ** 2,
            measure_weight=lambda P: 1.0 / (1 + (c * P) ** 2),
            p_bound=b, P_bound=np.inf)
    if tag == "tanh":
        return DeformationMap(
            tag, b,
            forward=lambda p: b * np.arctanh(p / b),
            inverse=lambda P: b * np.tanh(P / b),
            derivative=lambda p: 1.0 / (1 - (p / b) ** 2),
            position_factor=lambda P: np.cosh(P / b) ** 2,
            measure_weight=lambda P: 1.0 / np.cosh(P / b) ** 2,
            p_bound=b, P_bound=np.inf)
    if tag == "sin":
        if convention == "stated":
            factor, bound = (lambda P: np.sqrt(1 - (np.pi * P / b) ** 2)), b / np.pi
        else:
            factor, bound = (lambda P: np.sqrt(1 - (c * P) ** 2)), 1 / c
        return DeformationMap(
            tag, b,
            forward=lambda p: np.sin(c * p) / c,
            inverse=lambda P: np.arcsin(c * P) / c,
            derivative=lambda p: np.cos(c * p),
            position_factor=factor,
            measure_weight=lambda P: 1.0 / np.sqrt(1 - (c * P) ** 2),
            p_bound=b, P_bound=bound, convention=convention)
    one = lambda v: np.ones_like(np.asarray(v, float))
    return DeformationMap(tag, b, forward=lambda p: np.asarray(p, float), inverse=lambda P: np.asarray(P, float),
                          derivative=one, position_factor=one, measure_weight=one,
                          p_bound=np.inf, P_bound=np.inf)


def fd_derivative(values: np.ndarray, h: float, order: int = 8) -> np.ndarray:
    """Central finite-difference first derivative of the requested even order.

    The input is treated as zero beyond both ends.
    """
    if order not in _FD_WEIGHTS:
        raise InvalidArgument(f"finite-difference order must be one of {sorted(_FD_WEIGHTS)}")
    w = _FD_WEIGHTS[order]
    r = len(w)
    padded = np.concatenate([np.zeros(r, values.dtype), values, np.zeros(r, values.dtype)])
    n = values.size
    out = np.zeros_like(values)
    for j, wj in enumerate(w, start=1):
        out = out + wj * (padded[r + j:r + j + n] - padded[r - j:r - j + n])
    return out / h


def bump(P: np.ndarray, center: float, half_width: float) -> np.ndarray:
    """C-infinity bump ``exp(-1 / (1 - u^2))`` with ``u = (P - center) / half_width``."""
    u = (np.asarray(P, float) - center) / half_width
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1 - u[inside] ** 2))
    return out


def _support_check(dmap: DeformationMap, P: np.ndarray, values: np.ndarray):
    """Support must keep a 10% margin from the ends of the lattice and of the map domain."""
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        raise PreconditionViolation("test state vanishes identically")
    lo, hi = P[0], P[-1]
    if np.isfinite(dmap.P_bound):
        lo, hi = max(lo, -dmap.P_bound), min(hi, dmap.P_bound)
    margin = 0.1 * (hi - lo)
    inner = (P > lo + margin) & (P < hi - margin)
    if np.any(mag[~inner] > 1e-14 * peak):
        raise PreconditionViolation("test state has support within 10% of the domain edge")


def commutator_residual_arrays(dmap: DeformationMap, P: np.ndarray, values: np.ndarray,
                               hbar: float = 1.0, order: int = 8, expected: Callable | None = None) -> float:
    """Relative norm of ``([X, P] - i hbar C(P)) psi`` on a uniform P lattice.

    ``expected`` supplies C(P); by default the map's own prediction is used.
    """
    P = np.asarray(P, float)
    values = np.asarray(values, complex)
    h = P[1] - P[0]
    if not np.allclose(np.diff(P), h, rtol=1e-9, atol=0):
        raise InvalidArgument("P lattice must be uniform")
    _support_check(dmap, P, values)
    ok = np.abs(P) < dmap.P_bound
    g = np.zeros_like(P)
    g[ok] = dmap.position_factor(P[ok])

    def X(v):
        return 1j * hbar * g * fd_derivative(v, h, order)

    lhs = X(P * values) - P * X(values)
    c = np.zeros_like(P)
    c[ok] = (expected or dmap.position_factor)(P[ok])
    target = 1j * hbar * c * values
    return float(np.linalg.norm(lhs - target) / np.linalg.norm(target))


def commutator_residual(dmap: DeformationMap, psi: WaveFunction, params: ModelParams, order: int = 8,
                        expected: Callable | None = None) -> float:
    """Commutator check with ``psi`` read as amplitudes on its grid's momentum lattice."""
    mom = psi.momentum()
    return commutator_residual_arrays(dmap, mom.grid.momentum_grid, mom.amplitudes, params.hbar, order, expected)


@dataclass(frozen=True)
class ConvergenceCheck:
    spacings: np.ndarray
    residuals: np.ndarray
    observed_orders: np.ndarray     # log2 of successive residual ratios (halved spacing)


def commutator_convergence(dmap: DeformationMap, center: float, half_width: float, hbar: float = 1.0,
                           n_points=(512, 1024, 2048), order: int = 8,
                           expected: Callable | None = None) -> ConvergenceCheck:
    """Residuals for a bump on successively halved lattices spanning ``center +- 1.5 half_width``."""
    res, hs = [], []
    for n in n_points:
        P = np.linspace(center - 1.5 * half_width, center + 1.5 * half_width, n + 1)
        hs.append(P[1] - P[0])
        res.append(commutator_residual_arrays(dmap, P, bump(P, center, half_width), hbar, order, expected))
    res, hs = np.array(res), np.array(hs)
    orders = np.log(res[:-1] / res[1:]) / np.log(hs[:-1] / hs[1:])
    return ConvergenceCheck(hs, res, orders)


def weighted_inner(dmap: DeformationMap, P: np.ndarray, a: np.ndarray, b: np.ndarray) -> complex:
    """``integral w(P) a*(P) b(P) dP`` by the trapezoid rule on a uniform lattice."""
    P = dmap.check_P(P)
    return complex(np.trapezoid(dmap.measure_weight(P) * np.conj(a) * b, P))


@dataclass(frozen=True)
class DispersionResult:
    deformed_momentum: np.ndarray
    physical_momentum: np.ndarray
    kinetic: np.ndarray


def deformed_dispersion(tag: str, values, params: ModelParams, picture: str = "P",
                        convention: str = "stated") -> DispersionResult:
    """Kinetic energy ``f^-1(P)^2 / 2m`` together with the matching p <-> P pair.

    With ``picture='P'`` the values are deformed momenta; with ``'p'`` they
    are physical momenta and the deformed momentum ``f(p)`` is reported
    (e.g. ``(2 beta / pi) tan(pi p / 2 beta)`` or ``beta artanh(p / beta)``).
    """
    dmap = make_map(tag, params, convention)
    if picture == "P":
        P = dmap.check_P(values)
        p = dmap.inverse(P)
    elif picture == "p":
        p = dmap.check_p(values)
        P = dmap.check_P(dmap.forward(p)) if np.isfinite(dmap.P_bound) else dmap.forward(p)
    else:
        raise InvalidArgument(f"unknown picture {picture!r}")
    return DispersionResult(np.asarray(P, float), np.asarray(p, float), p**2 / (2 * params.mass))
