"""
Protected quench with the analog error
======================================

Quench the staggered state on the four-site ring with an error of strength
lam = J and increasing protection. The time-averaged violation settles on a
plateau that shrinks like 1/V^2; at V = 0 it keeps growing.
"""

import numpy as np

from z2lpg.evolve import QuenchConfig, run_quench
from z2lpg.lattice import LatticeSpec, ModelParams, build_hilbert_space, build_initial_state
from z2lpg.sequences import make_sequence

space = build_hilbert_space(LatticeSpec(4, "periodic"), sector=2)
psi0 = build_initial_state(space, "staggered")
seq = make_sequence("seventeenths")

print("   V     eps(1)      eps(10)")
plateaus = {}
for V in [0, 4, 16, 32, 64, 128]:
    ts = run_quench(space, ModelParams(lam=1.0, V=V), seq, psi0, QuenchConfig(t_max=10.0))
    plateaus[V] = np.median(ts.eps_avg[int(0.8 * len(ts)):])
    print(f"{V:5d}  {ts.eps_avg[ts.at(1.0)]:.3e}  {ts.eps_avg[-1]:.3e}")

print("\nplateau ratio V=32/64:", round(plateaus[32] / plateaus[64], 2))
print("plateau ratio V=64/128:", round(plateaus[64] / plateaus[128], 2))
