#!/usr/bin/env python3
"""Packet propagation under smeared Hamiltonians, and undoing the smearing."""
import warnings

import numpy as np

from nonlocalqm.evolution import PropagationConfig, free_gaussian, propagate
from nonlocalqm.grid import ModelParams, gaussian, make_grid
from nonlocalqm.hamiltonian import build_hamiltonian
from nonlocalqm.potentials import PotentialSpec
from nonlocalqm.smoothing import DeconvolutionConfig, deconvolve, gaussian_smooth

warnings.simplefilter("ignore")
grid = make_grid(512, -40, 40)
params = ModelParams(l_P=0.3)

# free packet: eigenbasis propagation against the closed form
psi0 = gaussian(grid, -5.0, 1.0, p0=1.0)
free = build_hamiltonian("standard", PotentialSpec.free(), grid, params)
traj = propagate(psi0, free, PropagationConfig(0.05, 100, store_every=20))
for t, amp in zip(traj.times, traj.amplitudes):
    err = np.max(np.abs(amp - free_gaussian(grid, t, params, -5.0, 1.0, 1.0).amplitudes))
    print(f"t {t:4.1f}: max error vs closed form {err:.1e}")

# coherent state in a smeared oscillator
g = make_grid(256, -10, 10)
for tag in ("standard", "gaussian_simple", "gaussian_midpoint"):
    op = build_hamiltonian(tag, PotentialSpec.harmonic(1.0), g, params)
    tr = propagate(gaussian(g, 2.0, 1.0), op, PropagationConfig(0.01, 628, store_every=157))
    print(f"{tag:18s} <x>(t) = {np.array2string(tr.series('mean_x'), precision=5)}  norm drift {tr.norm_drift:.0e}")

# blur a packet, then undo it with the truncated series; the grid must resolve l_P
psi = gaussian(make_grid(512, -20, 20), 0.0, 1.5, p0=0.8)
blurred = gaussian_smooth(psi, params)
for n in (1, 2, 4, 8):
    back = deconvolve(blurred, params, DeconvolutionConfig("hermite_series", n_max=n))
    print(f"series order {n}: error {np.linalg.norm(back.amplitudes - psi.amplitudes) / np.linalg.norm(psi.amplitudes):.2e}")
