"""
Strong protection and the adjusted gauge theory
===============================================

At large V the faulty dynamics follows H0 + lam P0 H1 P0 rather than H0.
Compare local observables of faulty runs against the adjusted theory.
"""

import numpy as np

from z2lpg.evolve import run_quench
from z2lpg.lattice import LatticeSpec, ModelParams, build_hilbert_space, build_initial_state
from z2lpg.sequences import make_sequence

space = build_hilbert_space(LatticeSpec(4, "periodic"), sector=2)
seq = make_sequence("seventeenths")

for state in ["staggered", "cdw"]:
    psi0 = build_initial_state(space, state)
    adjusted = run_quench(space, ModelParams(lam=1.0), seq, psi0, variant="adjusted")
    print(f"\n{state}:   V   max|dn_stag|   max|dE|")
    for V in [0, 16, 32, 64]:
        ts = run_quench(space, ModelParams(lam=1.0, V=V), seq, psi0)
        dn = np.abs(ts.n_stag - adjusted.n_stag).max()
        dE = np.abs(ts.E - adjusted.E).max()
        print(f"           {V:3d}   {dn:.4f}        {dE:.4f}")
