"""
Gauge structure of the four-site ring
=====================================

Build the half-filled Hilbert space, check that the ideal Hamiltonian and the
protection term commute with every gauge generator, and see how the two error
models act on the target sector.
"""

import numpy as np

from z2lpg.lattice import (
    LatticeSpec,
    build_analog_error,
    build_circuit_error,
    build_gauge_generator,
    build_hilbert_space,
    build_ideal_hamiltonian,
    build_initial_state,
    build_protection,
    build_target_projector,
    max_commutator,
)
from z2lpg.sequences import make_sequence

space = build_hilbert_space(LatticeSpec(4, "periodic"), sector=2)
print("basis dimension:", space.dim)

H0 = build_ideal_hamiltonian(space, J=1.0, h=0.3)
HW = build_protection(space, make_sequence("seventeenths"), V=1.0)
for j in range(1, 5):
    G = build_gauge_generator(space, j)
    print(f"j={j}  |[H0,G]|={max_commutator(H0, G):.1e}  |[HW,G]|={max_commutator(HW, G):.1e}")

# the target projector and the two error models
P0 = build_target_projector(space)
print("states in the target sector:", int(P0.diagonal().sum()))
for name, H1 in [("analog", build_analog_error(space)), ("circuit", build_circuit_error(space))]:
    inside = abs(P0 @ H1 @ P0).max()
    print(f"{name:8s} error: max |P0 H1 P0| = {inside:.3f}")

# protection energies of the states reached by one application of the analog error
psi = build_initial_state(space, "staggered")
reached = build_analog_error(space) @ psi
energies = HW.diagonal()[np.abs(reached) > 1e-12]
print("protection energies of the states one error away:", np.unique(np.round(energies, 4)))
