"""Dense operator container shared by the Hamiltonian builders and solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid1D, WaveFunction


def hermiticity_defect_of(entries: np.ndarray) -> float:
    return float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0


@dataclass
class OperatorMatrix:
    """Dense N x N matrix acting on position-space amplitudes.

    ``subspace`` is an optional isometry (N x M, orthonormal columns in the
    plain Euclidean sense) spanning an invariant subspace the operator is
    meant to be studied on, e.g. the band |p| <= beta. Solvers restrict to it
    when present. ``tag`` records which construction produced the matrix.
    """

    entries: np.ndarray
    tag: str
    grid: Grid1D
    subspace: np.ndarray | None = None
    info: dict = field(default_factory=dict)
    hermiticity_defect: float = field(init=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        n = self.grid.n_points
        if self.entries.shape != (n, n):
            raise ValueError(f"expected a ({n}, {n}) matrix, got {self.entries.shape}")
        self.hermiticity_defect = hermiticity_defect_of(self.entries)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def apply(self, psi: WaveFunction) -> WaveFunction:
        return psi.position().with_amplitudes(self.entries @ psi.position().amplitudes)

    def expectation(self, psi: WaveFunction) -> complex:
        v = psi.position().amplitudes
        return complex(np.vdot(v, self.entries @ v) / np.vdot(v, v))


def hermiticity_defect(op: OperatorMatrix) -> float:
    """Max entry of |H - H^dagger|."""
    return hermiticity_defect_of(op.entries)
