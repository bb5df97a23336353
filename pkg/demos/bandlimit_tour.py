#!/usr/bin/env python3
"""Hard momentum cutoff: what band-limited states can and cannot do."""
import numpy as np

from nonlocalqm.bandlimit import (
    project,
    projection_leakage,
    random_bandlimited,
    sinc_kernel_matrix,
    uncertainty_bound_check,
)
from nonlocalqm.grid import ModelParams, gaussian, make_grid
from nonlocalqm.hamiltonian import build_hamiltonian, well_depth_sweep
from nonlocalqm.potentials import PotentialSpec
from nonlocalqm.spectra import diagonalize, exterior_mass

grid = make_grid(512, -32, 32)
params = ModelParams(l_P=1.0)   # beta = hbar / l_P = 1
rng = np.random.default_rng(0)

# the lattice projector versus the continuum sinc kernel
per = sinc_kernel_matrix(grid, params, periodic=True)
cont = sinc_kernel_matrix(grid, params)
print("kernel idempotence  periodic %.1e   continuum %.1e"
      % (per.info["idempotence_defect"], cont.info["idempotence_defect"]))

# a narrow Gaussian loses most of its weight to the cutoff
for sigma in (0.3, 1.0, 3.0):
    _, rep = project(gaussian(grid, 0.0, sigma), params)
    print(f"sigma {sigma:3.1f}: kept norm {rep.projected_norm:.4f}, leaked {rep.leakage_norm:.2e}")

# position spreads never drop below hbar / 4 beta
ratios = [uncertainty_bound_check(random_bandlimited(grid, params, rng), params).ratio for _ in range(200)]
print("smallest dx / (hbar / 4 beta) over 200 random states: %.2f" % min(ratios))

# multiplying by a potential pushes weight out of the band again
psi0, _ = project(gaussian(grid, 0.0, 2.0), params)
print("out-of-band fraction of V psi0 (harmonic): %.3e" % projection_leakage(psi0, PotentialSpec.harmonic(1.0), params))

# eigenstates of a band-limited well leak into the walls
g2 = make_grid(512, -32, 32)
p2 = ModelParams(l_P=0.5)
op = build_hamiltonian("hermitisch2", PotentialSpec.cutoff_well(4.0), g2, p2, band_restricted=True)
spec = diagonalize(op, 4)
for n, (E, v) in enumerate(zip(spec.eigenvalues, spec.eigenvectors)):
    print(f"level {n}: E = {E:.6f}, weight outside the well {exterior_mass(v, 4.0):.3e}")

# deeper walls keep raising the ground energy
for factor, E in well_depth_sweep(4.0, g2, p2).items():
    print(f"wall {factor:6.0f} x beta^2/2m: ground energy {E[0]:.6f}")
