"""Shared fixtures and an independent Kronecker-product operator oracle."""

from functools import reduce

import numpy as np
import pytest

from z2lpg.lattice import LatticeSpec, build_hilbert_space

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)
HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
# matter qubit: index 0 is occupied, so the creation operator is sigma^+
CREATE = np.array([[0, 1], [0, 0]], dtype=complex)
ANNIHILATE = CREATE.conj().T
NUMBER = (I2 + SZ) / 2


class KronOracle:
    """Dense operators built from Kronecker products in the tau^z link basis.

    Qubit ``2(j-1)`` is matter site ``j`` and qubit ``2j-1`` is link ``j``.
    :meth:`to_library` rotates links to the tau^x basis and reorders rows to
    the library's basis.
    """

    def __init__(self, L, boundary):
        self.L = L
        self.bonds = [(j, j + 1) for j in range(1, L)] + ([(L, 1)] if boundary == "periodic" else [])

    def op(self, ops):
        return reduce(np.kron, [ops.get(q, I2) for q in range(2 * self.L)])

    @staticmethod
    def m(j):
        return 2 * (j - 1)

    @staticmethod
    def l(j):
        return 2 * j - 1

    def hop(self, j, k, link):
        t = self.op({self.m(j): CREATE, self.l(j): link, self.m(k): ANNIHILATE})
        return t

    def ideal(self, J=1.0, h=0.3):
        H = sum(-J * (self.hop(j, k, SZ) + self.hop(j, k, SZ).conj().T) for j, k in self.bonds)
        return H - h * sum(self.op({self.l(j): SX}) for j in range(1, self.L + 1))

    def analog_error(self, alphas):
        a1, a2, a3, a4 = alphas
        tp, tm = (SX + 1j * SY) / 2, (SX - 1j * SY) / 2
        H = 0
        for j, k in self.bonds:
            t = a1 * self.hop(j, k, tp) + a2 * self.hop(j, k, tm)
            H = H + t + t.conj().T
            H = H + a3 * self.op({self.m(j): NUMBER, self.l(j): SZ}) - a4 * self.op({self.m(k): NUMBER, self.l(j): SZ})
        return H

    def to_library(self, H, space):
        U = self.op({self.l(j): HADAMARD for j in range(1, self.L + 1)})
        Hx = U.conj().T @ H @ U
        perm = []
        for occ, links in zip(space.occupations, space.link_values):
            bits = []
            for n, x in zip(occ, links):
                bits += [0 if n == 1 else 1, 0 if x == 1 else 1]
            perm.append(int("".join(map(str, bits)), 2))
        perm = np.array(perm)
        return Hx[np.ix_(perm, perm)]


@pytest.fixture
def oracle():
    return KronOracle


@pytest.fixture(scope="session")
def pbc4():
    return build_hilbert_space(LatticeSpec(4, "periodic"))


@pytest.fixture(scope="session")
def pbc4_half():
    return build_hilbert_space(LatticeSpec(4, "periodic"), 2)


@pytest.fixture(scope="session")
def open6_half():
    return build_hilbert_space(LatticeSpec(6, "open"), 3)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
