"""
Trotterized circuit on an open six-site chain
=============================================

Compile one first-order Trotter step into gates, run 100 steps with the
circuit error at lam = 0.1 J, and scan the final violation against V. Past
V_ideal = pi / (2 dt) the protection gates alias and the suppression degrades.
"""

import numpy as np

from z2lpg.lattice import LatticeSpec, ModelParams, build_hilbert_space, build_initial_state
from z2lpg.sequences import make_sequence
from z2lpg.trotter import CircuitConfig, compile_step, ideal_protection_strength, run_circuit, scan_final_violation, to_netlist

space = build_hilbert_space(LatticeSpec(6, "open"), sector=3)
seq = make_sequence("elevenths")
psi0 = build_initial_state(space, "staggered")

step = compile_step(space, ModelParams(lam=0.1, V=4.0, error_model="circuit"), seq, dt=0.2)
print("gates per step:", step.counts())
print(to_netlist(step).splitlines()[:6])

ideal = run_circuit(space, CircuitConfig(0.2, 100, ModelParams(error_model="circuit"), seq), psi0)
for V in [0.0, 1.0, 2.0, 4.0]:
    ts = run_circuit(space, CircuitConfig(0.2, 100, ModelParams(lam=0.1, V=V, error_model="circuit"), seq), psi0)
    print(f"V={V:3.1f}  eps_raw(20)={ts.eps_raw[-1]:.4f}  mean|n_stag - ideal|={np.mean(np.abs(ts.n_stag - ideal.n_stag)):.4f}")

print("\nV_ideal at dt=0.2:", round(ideal_protection_strength(0.2), 3))
template = CircuitConfig(0.2, 1, ModelParams(lam=0.1, error_model="circuit"), seq)
for V, eps in scan_final_violation(space, template, [1, 2, 4, 6, 8, 12, 16], psi0):
    print(f"  V={V:5.1f}  eps_f={eps:.5f}")
