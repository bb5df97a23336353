"""Classical flows with momentum-suppressed potentials.

The smeared Hamiltonian is ``H = p^2/2m + V(r) exp(-l_P^2 p^2 / 4 hbar^2)``,
giving

    dr/dt = p/m - (l_P^2 V(r) p / 2 hbar^2) exp(-l_P^2 p^2 / 4 hbar^2)
    dp/dt = -grad V(r) exp(-l_P^2 p^2 / 4 hbar^2)

The hard-cutoff alternative switches the potential (or the whole
Hamiltonian) off for ``|p| > beta``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import IntegrationFailure, InvalidArgument, SingularityError
from .grid import ModelParams

EXPONENT_CUTOFF = 700.0
# local error control runs this much tighter than the requested accuracy so
# that errors accumulated over many revolutions stay within it
STEP_SAFETY = 1e-3
THETA_MODES = ("potential_only", "full_hamiltonian")


@dataclass(frozen=True)
class ClassicalState:
    position: np.ndarray
    momentum: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.position, float))
        p = np.atleast_1d(np.asarray(self.momentum, float))
        if r.shape != p.shape or r.ndim != 1 or not 1 <= r.size <= 3:
            raise InvalidArgument("position and momentum must be matching vectors of dimension 1..3")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(p)) and np.isfinite(self.time)):
            raise InvalidArgument("state components must be finite")
        object.__setattr__(self, "position", r)
        object.__setattr__(self, "momentum", p)

    @property
    def dim(self) -> int:
        return self.position.size

    def flat(self) -> np.ndarray:
        return np.concatenate([self.position, self.momentum])

    @classmethod
    def from_flat(cls, y, t: float = 0.0) -> "ClassicalState":
        d = len(y) // 2
        return cls(y[:d], y[d:], t)


@dataclass(frozen=True)
class ClassicalPotential:
    """``kepler``: V = -strength / |r|; ``harmonic``: V = stiffness |r|^2 / 2;
    ``custom``: user value and gradient callables."""

    kind: str
    strength: float = 1.0
    stiffness: float = 1.0
    value_fn: Callable | None = field(default=None, compare=False)
    gradient_fn: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("kepler", "harmonic", "custom"):
            raise InvalidArgument(f"unknown classical potential {self.kind!r}")
        if self.kind == "custom" and (self.value_fn is None or self.gradient_fn is None):
            raise InvalidArgument("custom potential needs value_fn and gradient_fn")

    @classmethod
    def kepler(cls, strength: float) -> "ClassicalPotential":
        return cls("kepler", strength=strength)

    @classmethod
    def harmonic(cls, omega: float, mass: float = 1.0) -> "ClassicalPotential":
        return cls("harmonic", stiffness=mass * omega**2)

    @classmethod
    def custom(cls, value_fn, gradient_fn) -> "ClassicalPotential":
        return cls("custom", value_fn=value_fn, gradient_fn=gradient_fn)

    def value(self, r) -> float:
        r = np.asarray(r, float)
        if self.kind == "kepler":
            d = np.linalg.norm(r)
            if d == 0:
                raise SingularityError("Kepler potential is singular at r = 0")
            return -self.strength / d
        if self.kind == "harmonic":
            return 0.5 * self.stiffness * float(r @ r)
        return float(self.value_fn(r))

    def gradient(self, r) -> np.ndarray:
        r = np.asarray(r, float)
        if self.kind == "kepler":
            d = np.linalg.norm(r)
            if d == 0:
                raise SingularityError("Kepler potential is singular at r = 0")
            return self.strength * r / d**3
        if self.kind == "harmonic":
            return self.stiffness * r
        return np.asarray(self.gradient_fn(r), float)


def _suppression(p2: float, params: ModelParams) -> float:
    expo = params.l_P**2 * p2 / (4 * params.hbar**2)
    return 0.0 if expo > EXPONENT_CUTOFF else float(np.exp(-expo))


def modified_rhs(state: ClassicalState, potential: ClassicalPotential, params: ModelParams):
    """``(dr/dt, dp/dt)`` of the smeared Hamiltonian."""
    r, p = state.position, state.momentum
    fac = _suppression(float(p @ p), params)
    if params.l_P == 0:
        return p / params.mass, -potential.gradient(r)
    V = potential.value(r)
    rdot = p / params.mass - (params.l_P**2 * V / (2 * params.hbar**2)) * fac * p
    return rdot, -potential.gradient(r) * fac


def hamiltonian_value(state: ClassicalState, potential: ClassicalPotential, params: ModelParams) -> float:
    p2 = float(state.momentum @ state.momentum)
    return p2 / (2 * params.mass) + potential.value(state.position) * _suppression(p2, params)


@dataclass(frozen=True)
class SuppressionReport:
    momentum: float
    exponent: float
    sign: int
    log10_factor: float

    @property
    def factor(self) -> float:
        """The plain factor; zero once it underflows."""
        return 0.0 if self.exponent > EXPONENT_CUTOFF else float(np.exp(-self.exponent))


def suppression_factor(mass: float, speed: float, params: ModelParams) -> SuppressionReport:
    """``exp(-(p l_P / hbar)^2 / 4)`` for ``p = mass * speed``, kept as a log."""
    if not (mass > 0 and speed >= 0):
        raise InvalidArgument("mass must be > 0 and speed >= 0")
    p = mass * speed
    expo = (p * params.l_P / params.hbar) ** 2 / 4
    return SuppressionReport(float(p), float(expo), 1, float(-expo / np.log(10)))


def effective_planck_length(l_P: float, n_constituents: float, alpha: float) -> float:
    """``l_P / n^alpha``: a scaling knob for composite bodies, not a derived law."""
    if n_constituents < 1:
        raise InvalidArgument("n_constituents must be >= 1")
    if alpha < 0:
        raise InvalidArgument("alpha must be >= 0")
    return float(l_P / n_constituents**alpha)


@dataclass
class OrbitResult:
    times: np.ndarray
    positions: np.ndarray           # (n_frames, dim)
    momenta: np.ndarray
    energies: np.ndarray
    perihelion_times: np.ndarray
    perihelion_angles: np.ndarray
    max_deviation: float | None = None      # relative to the l_P = 0 run
    reference: "OrbitResult | None" = None
    n_rhs: int = 0

    @property
    def energy_drift(self) -> float:
        e0 = self.energies[0]
        return float(np.max(np.abs(self.energies - e0)) / max(abs(e0), np.finfo(float).tiny))


def _flat_rhs(potential, params, d):
    def f(t, y):
        rdot, pdot = modified_rhs(ClassicalState(y[:d], y[d:], t), potential, params)
        return np.concatenate([rdot, pdot])

    return f


def _perihelia(sol, times, positions):
    """Times and polar angles of radial minima.

    A minimum is where ``r . p`` (proportional to ``d|r|^2/dt``, since the
    velocity is parallel to p) changes sign from - to +; each crossing on
    the frames is refined with Brent's method on the dense output.
    """
    d = positions.shape[1]
    if d < 2:
        return np.array([]), np.array([])

    def radial(t):
        y = sol(t)
        return float(y[:d] @ y[d:])

    y = sol(times)
    g = np.einsum("ij,ij->j", y[:d], y[d:])
    idx = np.where((g[:-1] < 0) & (g[1:] >= 0))[0]
    t_out, a_out = [], []
    for i in idx:
        tc = times[i + 1] if g[i + 1] == 0 else brentq(radial, times[i], times[i + 1], xtol=1e-15, rtol=1e-15)
        yc = sol(tc)
        t_out.append(tc)
        a_out.append(np.arctan2(yc[1], yc[0]))
    return np.array(t_out), np.array(a_out)


def integrate_orbit(state0: ClassicalState, potential: ClassicalPotential, params: ModelParams,
                    t_end: float, tol: float = 1e-10, reference: bool = True, n_frames: int = 4001,
                    method: str = "RK45") -> OrbitResult:
    """Adaptive Runge-Kutta integration of :func:`modified_rhs`.

    ``tol`` is the accuracy asked of the whole run (trajectory and the
    conserved H). The embedded pair controls its local error at
    ``STEP_SAFETY * tol``, relative, with absolute floors scaled by the
    initial position and momentum magnitudes. With
    ``reference`` an ``l_P = 0`` run with identical settings is attached and
    ``max_deviation`` is the largest position difference over the frames,
    relative to the largest radius.
    """
    if not t_end > 0:
        raise InvalidArgument("t_end must be > 0")
    y0 = state0.flat()
    d = state0.dim
    v0 = potential.value(state0.position)  # raises on singular starts
    tiny = np.finfo(float).tiny
    scale_r = max(np.linalg.norm(state0.position), tiny)
    # a start at rest still has the momentum scale set by the potential
    scale_p = max(np.linalg.norm(state0.momentum), np.sqrt(2 * params.mass * abs(v0)), tiny)
    rtol = STEP_SAFETY * tol
    atol = np.concatenate([np.full(d, rtol * scale_r), np.full(d, rtol * scale_p)])
    t_eval = np.linspace(state0.time, state0.time + t_end, n_frames)
    try:
        sol = solve_ivp(_flat_rhs(potential, params, d), (state0.time, state0.time + t_end), y0,
                        method=method, rtol=rtol, atol=atol, t_eval=t_eval, dense_output=True)
    except SingularityError as exc:
        raise IntegrationFailure(f"integrate_orbit: {exc}") from exc
    if sol.status != 0:
        partial = ClassicalState.from_flat(sol.y[:, -1], sol.t[-1]) if sol.t.size else state0
        raise IntegrationFailure(f"integrate_orbit: {sol.message}", partial=(sol.t, sol.y.T, partial))
    pos, mom = sol.y[:d].T, sol.y[d:].T
    energies = np.array([hamiltonian_value(ClassicalState(r, p), potential, params) for r, p in zip(pos, mom)])
    pt, pa = _perihelia(sol.sol, sol.t, pos)
    out = OrbitResult(sol.t, pos, mom, energies, pt, pa, n_rhs=sol.nfev)
    if reference:
        ref_params = params.replace(l_P=0.0, beta=params.beta)
        ref = integrate_orbit(state0, potential, ref_params, t_end, tol, reference=False,
                              n_frames=n_frames, method=method)
        out.reference = ref
        span = np.max(np.linalg.norm(ref.positions, axis=1))
        out.max_deviation = float(np.max(np.linalg.norm(pos - ref.positions, axis=1)) / span)
    return out


def theta_cutoff_rhs(state: ClassicalState, potential: ClassicalPotential, params: ModelParams,
                     mode: str = "potential_only", inside: bool | None = None):
    """Hard-cutoff dynamics.

    ``potential_only``: dp/dt = -grad V for |p| < beta, 0 beyond; dr/dt = p/m.
    ``full_hamiltonian``: standard flow for |p| < beta, frozen beyond.
    ``inside`` forces the branch (used when restarting exactly on the step).
    """
    if mode not in THETA_MODES:
        raise InvalidArgument(f"unknown mode {mode!r}; expected one of {THETA_MODES}")
    p = state.momentum
    pn = float(np.linalg.norm(p))
    if inside is None:
        if abs(pn - params.beta) <= 1e-12 * params.beta:
            warnings.warn("|p| sits on the cutoff; the flow is discontinuous here", stacklevel=2)
        inside = pn < params.beta
    if inside:
        return p / params.mass, -potential.gradient(state.position)
    if mode == "potential_only":
        return p / params.mass, np.zeros_like(p)
    return np.zeros_like(p), np.zeros_like(p)


@dataclass
class CutoffOrbit:
    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    crossings: list


def integrate_theta_cutoff(state0: ClassicalState, potential: ClassicalPotential, params: ModelParams,
                           t_end: float, mode: str = "potential_only", tol: float = 1e-10,
                           n_frames: int = 1001, max_restarts: int = 100) -> CutoffOrbit:
    """Integrate :func:`theta_cutoff_rhs`, stopping at each ``|p| = beta`` crossing and restarting
    on the other branch. Crossings are located by the solver's bracketing root finder."""
    d = state0.dim
    beta = params.beta
    t0, t1 = state0.time, state0.time + t_end
    t_eval = np.linspace(t0, t1, n_frames)
    y = state0.flat()
    inside = bool(np.linalg.norm(state0.momentum) < beta)
    t = t0
    ts, ys, crossings = [], [], []
    for _ in range(max_restarts + 1):
        def rhs(tt, yy, inside=inside):
            a, b = theta_cutoff_rhs(ClassicalState(yy[:d], yy[d:], tt), potential, params, mode, inside)
            return np.concatenate([a, b])

        def event(tt, yy):
            return np.linalg.norm(yy[d:]) - beta

        event.terminal = True
        sel = t_eval[(t_eval >= t) & (t_eval <= t1)]
        if not np.any(np.abs(rhs(t, y)) > 0):
            # frozen: the state is an exact fixed point
            ts.append(sel)
            ys.append(np.tile(y, (sel.size, 1)))
            break
        sol = solve_ivp(rhs, (t, t1), y, method="RK45", rtol=STEP_SAFETY * tol,
                        atol=STEP_SAFETY * tol * max(1.0, np.abs(y).max()),
                        t_eval=sel, events=event, dense_output=True)
        if sol.status == -1:
            raise IntegrationFailure(f"integrate_theta_cutoff: {sol.message}", partial=(sol.t, sol.y.T))
        ts.append(sol.t)
        ys.append(sol.y.T)
        if sol.status != 1:
            break
        t = float(sol.t_events[0][0])
        y = sol.y_events[0][0]
        crossings.append(t)
        inside = not inside
    else:
        raise IntegrationFailure("integrate_theta_cutoff: too many cutoff crossings")
    times = np.concatenate(ts)
    states = np.vstack(ys)
    return CutoffOrbit(times, states[:, :d], states[:, d:], crossings)
