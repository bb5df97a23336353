#!/usr/bin/env python3
"""Deformed momenta and the commutators they produce, checked on bump states."""
import numpy as np

from nonlocalqm.algebra import commutator_convergence, deformed_dispersion, make_map
from nonlocalqm.grid import ModelParams

params = ModelParams(l_P=0.1)
beta = params.beta

for tag, center, half in (("tan", 0.5, 1.0), ("tanh", 0.3, 1.0), ("sin", 0.05, 0.2)):
    conv = commutator_convergence(make_map(tag, params), center * beta, half * beta)
    print(f"{tag:5s} residuals {np.array2string(conv.residuals, precision=2)}  "
          f"orders {np.array2string(conv.observed_orders, precision=2)}")

# the two sin conventions differ under the square root
P = np.linspace(-0.3, 0.3, 7)
print("sin stated  C(P):", np.round(make_map("sin", params).commutator(P), 5))
print("sin derived C(P):", np.round(make_map("sin", params, "derived").commutator(P), 5))

# physical momentum saturates at beta while P grows without bound
for tag in ("tan", "tanh"):
    d = deformed_dispersion(tag, np.array([1.0, 10.0, 100.0, 1000.0]), params)
    print(f"{tag:5s} p(P) =", np.round(d.physical_momentum, 4), " kinetic =", np.round(d.kinetic, 3))
