#!/usr/bin/env python3
"""Gaussian-smeared potentials: level shifts against the smearing length."""
import warnings

import numpy as np

from nonlocalqm.grid import ModelParams, gaussian, make_grid
from nonlocalqm.hamiltonian import HamiltonianVariant, WeightPolicy, build_hamiltonian
from nonlocalqm.potentials import PotentialSpec
from nonlocalqm.spectra import convergence_study, diagonalize

warnings.simplefilter("ignore")
grid = make_grid(1024, -8, 8)
params = ModelParams(l_P=0.1)
osc = PotentialSpec.harmonic(1.0)
l_values = [0.4, 0.2, 0.1, 0.05]

for tag in ("gaussian_simple", "gaussian_midpoint"):
    res = convergence_study(tag, osc, params, l_values, grid, n_levels=3)
    print(f"{tag}: log-log slope {res.slope:.4f}")
    for l, d, f in zip(res.l_values, res.diag_shifts, res.formula_shifts):
        print(f"   l_P {l:5.3f}  shifts {np.array2string(d, precision=6)}  formula {np.array2string(f, precision=6)}")

# the simple smearing shifts every oscillator level by the same amount
for l in (0.2, 0.4):
    p = params.replace(l_P=l)
    std = diagonalize(build_hamiltonian("standard", osc, grid, p), 4).eigenvalues
    mod = diagonalize(build_hamiltonian("gaussian_simple", osc, grid, p), 4).eigenvalues
    print(f"l_P {l}: shifts {np.array2string(mod - std, precision=10)}  vs  l^2/4 = {l * l / 4}")

# hybrid weight: nonlocal for narrow packets, local for wide ones
rule = WeightPolicy("spread_rule", alpha=3.0)
wide_grid = make_grid(4096, -2000, 2000)
for sigma in (0.05, 1.0, 150.0):
    g = wide_grid if sigma > 10 else grid
    w1 = rule.resolve(gaussian(g, 0.0, sigma), params).w1
    E = diagonalize(build_hamiltonian(HamiltonianVariant("weighted_hybrid", w1), osc, grid, params), 1).eigenvalues[0]
    print(f"packet width {sigma:7.2f}: w1 = {w1:.2e}, ground energy {E:.12f}")
