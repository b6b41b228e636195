"""
Which coefficient sequences protect the target sector?
======================================================

A sequence is compliant when no nonzero deviation pattern has zero protection
energy. Compare the seventeenths, elevenths and uniform sequences and tabulate
the fraction of resonant patterns as the chain grows.
"""

from z2lpg.sequences import is_compliant, make_sequence, resonance_fraction

for name, L in [("seventeenths", 4), ("seventeenths", 8), ("elevenths", 4), ("uniform", 2)]:
    rep = is_compliant(make_sequence(name), L)
    print(f"{name:13s} L={L}: compliant={rep.compliant}  witness={rep.witness}")

seq = make_sequence("seventeenths")
print("\n L   resonant fraction")
for L in range(4, 21, 4):
    R = resonance_fraction(seq, L)
    print(f"{L:3d}   {float(R):.5f}   ({R})")

# a custom sequence given as rationals
custom = make_sequence(["1", "-2", "4", "-8"])
print("\npowers of two, L=4:", is_compliant(custom, 4).compliant)
