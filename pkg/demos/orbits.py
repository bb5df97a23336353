#!/usr/bin/env python3
"""Classical orbits with a momentum-suppressed potential."""
import numpy as np

from nonlocalqm.classical import (
    ClassicalPotential,
    ClassicalState,
    effective_planck_length,
    integrate_orbit,
    integrate_theta_cutoff,
    suppression_factor,
)
from nonlocalqm.grid import ModelParams

kepler = ClassicalPotential.kepler(1.0)
s0 = ClassicalState([1.0, 0.0], [0.0, 1.2])
period = 2 * np.pi * (1 / (2 - 1.2**2)) ** 1.5

# perihelion advance per revolution grows with l_P
for l in (1e-6, 0.05, 0.1, 0.2, 0.3):
    orb = integrate_orbit(s0, kepler, ModelParams(l_P=l, beta=1.0), 5.5 * period, tol=1e-9)
    step = np.diff(orb.perihelion_angles).mean() if orb.perihelion_angles.size > 1 else 0.0
    print(f"l_P {l:7.1e}: advance/rev {step:+.3e} rad, deviation {orb.max_deviation:.2e}, H drift {orb.energy_drift:.1e}")

# an earth-sized body: exp(-exponent) is far below anything representable
hbar = 1.054571817e-34
earth = ModelParams(hbar=hbar, l_P=hbar / 6.5)
rep = suppression_factor(6e24, 3e4, earth)
print(f"earth: exponent {rep.exponent:.3e}, log10 factor {rep.log10_factor:.3e}")
for alpha in (0.5, 1.0, 1.5):
    l_eff = effective_planck_length(earth.l_P, 1e36, alpha)
    print(f"  composite alpha {alpha}: exponent {suppression_factor(6e24, 3e4, earth.replace(l_P=l_eff)).exponent:.3e}")

# hard cutoff: an oscillator released at rest speeds up until |p| = beta
out = integrate_theta_cutoff(ClassicalState([3.0], [0.0]), ClassicalPotential.harmonic(1.0), ModelParams(l_P=0.5), 3.0)
print("cutoff crossing at t = %.12f (arcsin(2/3) = %.12f), final p = %.6f"
      % (out.crossings[0], np.arcsin(2 / 3), out.momenta[-1, 0]))
