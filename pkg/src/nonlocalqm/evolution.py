"""Time propagation under Hermitian Hamiltonian matrices, and packet smearing."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InvalidArgument, PreconditionViolation
from .grid import MOMENTUM, Grid1D, ModelParams, WaveFunction, observables
from .operators import OperatorMatrix

HERMITIAN_TOL = 1e-10
METHODS = ("exact_eigenbasis", "crank_nicolson")
# drift budgets checked after every run
NORM_DRIFT_TOL = {"exact_eigenbasis": 1e-12, "crank_nicolson": 1e-8}


@dataclass(frozen=True)
class PropagationConfig:
    dt: float
    n_steps: int
    method: str = "exact_eigenbasis"
    store_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgument("dt must be > 0")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidArgument("n_steps must be an integer >= 1")
        if self.method not in METHODS:
            raise InvalidArgument(f"unknown method {self.method!r}; expected one of {METHODS}")
        if int(self.store_every) != self.store_every or self.store_every < 1:
            raise InvalidArgument("store_every must be an integer >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray          # (n_frames, n_points), position representation
    grid: Grid1D
    norms: np.ndarray               # L2 norm per frame
    energies: np.ndarray            # <H> per frame
    method: str
    observables: list = field(default_factory=list)

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - self.norms[0])))

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energies[0])))

    def state(self, i: int) -> WaveFunction:
        return WaveFunction(self.grid, self.amplitudes[i])

    @property
    def final(self) -> WaveFunction:
        return self.state(-1)

    def series(self, name: str) -> np.ndarray:
        """One observable (e.g. ``'mean_x'``) across the stored frames."""
        return np.array([getattr(o, name) for o in self.observables])


def propagate(psi0: WaveFunction, op: OperatorMatrix, cfg: PropagationConfig,
              reverse: bool = False, with_observables: bool = True) -> Trajectory:
    """Solve ``i hbar d psi/dt = H psi`` for ``cfg.n_steps`` steps of ``cfg.dt``.

    ``exact_eigenbasis`` diagonalises H once and evolves phases, evaluating
    ``exp(-i E t / hbar)`` at every stored time directly (no accumulated
    products). ``crank_nicolson`` factorises ``1 + i H dt / 2 hbar`` once
    and steps. ``reverse`` runs time backwards.
    """
    if op.hermiticity_defect > HERMITIAN_TOL:
        raise PreconditionViolation(
            f"propagation needs a Hermitian operator; {op.tag!r} has defect {op.hermiticity_defect:.3e}")
    grid = op.grid
    if psi0.grid != grid:
        raise InvalidArgument("state and operator live on different grids")
    hbar = grid.hbar
    H = 0.5 * (op.entries + op.entries.conj().T)
    dt = -cfg.dt if reverse else cfg.dt
    steps = np.arange(0, cfg.n_steps + 1, cfg.store_every)
    if steps[-1] != cfg.n_steps:
        steps = np.append(steps, cfg.n_steps)
    times = steps * dt
    v0 = psi0.position().amplitudes

    if cfg.method == "exact_eigenbasis":
        E, U = sla.eigh(H)
        c0 = U.conj().T @ v0
        frames = (U @ (c0[:, None] * np.exp(-1j * np.outer(E, times) / hbar))).T
    else:
        n = grid.n_points
        a = np.eye(n) + 0.5j * dt / hbar * H
        b = np.eye(n) - 0.5j * dt / hbar * H
        lu = sla.lu_factor(a)
        frames = np.empty((steps.size, n), complex)
        frames[0] = v0
        cur = v0
        k = 1
        for step in range(1, cfg.n_steps + 1):
            cur = sla.lu_solve(lu, b @ cur)
            if k < steps.size and step == steps[k]:
                frames[k] = cur
                k += 1

    dx = grid.spacing
    norms = np.sqrt(np.sum(np.abs(frames) ** 2, axis=1) * dx)
    energies = np.real(np.einsum("ti,ti->t", frames.conj(), frames @ H.T)) * dx
    traj = Trajectory(times, frames, grid, norms, energies, cfg.method)
    if with_observables:
        traj.observables = [observables(WaveFunction(grid, f)) for f in frames]
    budget = NORM_DRIFT_TOL[cfg.method] * max(1.0, norms[0])
    if traj.norm_drift > budget:
        warnings.warn(f"norm drift {traj.norm_drift:.3e} exceeds {budget:.1e}", stacklevel=2)
    return traj


def smearing_factor(p, params: ModelParams) -> np.ndarray:
    """Fourier transform of the 1D smearing Gaussian, ``exp(-k^2 l_P^2 / 4)``, at ``k = p / hbar``."""
    k = np.asarray(p, float) / params.hbar
    return np.exp(-(k**2) * params.l_P**2 / 4)


def smear_packet(g: WaveFunction, params: ModelParams) -> WaveFunction:
    """Multiply the momentum amplitude of ``g`` by ``exp(-k^2 l_P^2 / 4)``.

    The result is returned in the momentum representation.
    """
    mom = g.momentum()
    return WaveFunction(g.grid, mom.amplitudes * smearing_factor(g.grid.momentum_grid, params), MOMENTUM)


def free_gaussian(grid: Grid1D, t: float, params: ModelParams, x0: float = 0.0,
                  sigma: float = 1.0, p0: float = 0.0) -> WaveFunction:
    """Closed-form free evolution of :func:`nonlocalqm.grid.gaussian` on the infinite line."""
    hbar, m = params.hbar, params.mass
    s = 1 + 1j * hbar * t / (m * sigma**2)
    x = grid.x
    amp = ((np.pi * sigma**2) ** -0.25 / np.sqrt(s)
           * np.exp(-((x - x0 - p0 * t / m) ** 2) / (2 * sigma**2 * s)
                    + 1j * p0 * x / hbar - 1j * p0**2 * t / (2 * m * hbar)))
    return WaveFunction(grid, amp)

