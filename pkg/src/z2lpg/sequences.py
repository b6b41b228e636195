"""Pseudogenerator coefficient sequences, compliance and resonant-sector counting.

A deviation configuration ``s`` assigns ``s_j = (w_j - g_j^tar) / 2`` in
``{-1, 0, +1}`` to every constraint. A sequence is compliant on ``L`` sites
when the only ``s`` with ``sum_j c_j s_j = 0`` is ``s = 0``. Everything here
is exact: coefficients are :class:`fractions.Fraction` and sums are taken over
integers after clearing denominators.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError

__all__ = [
    "ENUM_CAP",
    "CoeffSequence",
    "ComplianceReport",
    "make_sequence",
    "integer_weights",
    "zero_sum_count",
    "is_compliant",
    "resonance_fraction",
    "brute_force_zero_sums",
]

ENUM_CAP = 24


@dataclass(frozen=True)
class CoeffSequence:
    """Nonzero rational coefficients ``c_1..c_p`` repeated with period ``p``."""

    coefficients: tuple[Fraction, ...]
    tag: str = "custom"

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("empty coefficient sequence")
        if any(c == 0 for c in coeffs):
            raise ValueError("coefficients must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def period(self) -> int:
        return len(self.coefficients)

    def coefficient(self, j: int) -> Fraction:
        """Coefficient of constraint ``j`` (1-based, periodic extension)."""
        return self.coefficients[(j - 1) % self.period]

    def take(self, L: int) -> tuple[Fraction, ...]:
        return tuple(self.coefficient(j) for j in range(1, L + 1))

    def scaled(self, factor) -> "CoeffSequence":
        factor = Fraction(factor)
        return CoeffSequence(tuple(c * factor for c in self.coefficients), self.tag)

    def as_strings(self) -> list[str]:
        return [str(c) for c in self.coefficients]


def make_sequence(preset: str | Iterable = "seventeenths") -> CoeffSequence:
    """Build a preset sequence or wrap a custom list of rationals.

    ``seventeenths`` is ``{-1, 3, -7, 17}/17``; ``elevenths`` is
    ``c_j = [6 (-1)^j + 5] / 11``; ``uniform`` is all ones. Any other iterable
    is parsed entry by entry with :class:`~fractions.Fraction` (strings such
    as ``"-7/17"`` are accepted).
    """
    if isinstance(preset, str):
        if preset == "seventeenths":
            return CoeffSequence(tuple(Fraction(n, 17) for n in (-1, 3, -7, 17)), "seventeenths")
        if preset == "elevenths":
            return CoeffSequence(tuple(Fraction(6 * (-1) ** j + 5, 11) for j in (1, 2)), "elevenths")
        if preset == "uniform":
            return CoeffSequence((Fraction(1),), "uniform")
        if "," in preset:
            return make_sequence(p.strip() for p in preset.split(","))
        raise ValueError(f"unknown sequence preset {preset!r}")
    return CoeffSequence(tuple(Fraction(c) for c in preset), "custom")


def integer_weights(seq: CoeffSequence, L: int) -> list[int]:
    """Coefficients on ``L`` sites multiplied by the lcm of their denominators."""
    coeffs = seq.take(L)
    den = lcm(*(c.denominator for c in coeffs))
    return [int(c * den) for c in coeffs]


def _check_cap(L: int, cap: int) -> None:
    if L < 1:
        raise ValueError("L must be at least 1")
    if L > cap:
        raise CapacityError(f"L = {L} exceeds enumeration cap {cap}")


def zero_sum_count(weights: Sequence[int]) -> int:
    """Number of ``s`` in ``{-1,0,1}^L`` (including ``s = 0``) with ``sum w_j s_j = 0``."""
    counts = {0: 1}
    for w in weights:
        nxt: dict[int, int] = {}
        for total, n in counts.items():
            for step in (-w, 0, w):
                nxt[total + step] = nxt.get(total + step, 0) + n
        counts = nxt
    return counts.get(0, 0)


def _find_witness(weights: Sequence[int]) -> tuple[int, ...] | None:
    """Nonzero zero-sum configuration with the fewest nonzero entries, or None."""
    # Keys are (partial sum, any nonzero so far); values are (support, parent key, s).
    Key = tuple[int, bool]
    layers: list[dict[Key, tuple[int, Key, int]]] = []
    cost: dict[Key, int] = {(0, False): 0}
    for w in weights:
        layer: dict[Key, tuple[int, Key, int]] = {}
        for state in sorted(cost):
            total, used = state
            for s in (0, 1, -1):
                key = (total + s * w, used or s != 0)
                c = cost[state] + (s != 0)
                if key not in layer or c < layer[key][0]:
                    layer[key] = (c, state, s)
        layers.append(layer)
        cost = {k: v[0] for k, v in layer.items()}
    goal = (0, True)
    if goal not in cost:
        return None
    out = []
    state = goal
    for layer in reversed(layers):
        _, state, s = layer[state]
        out.append(s)
    out.reverse()
    # s and -s are both witnesses; report the one whose first nonzero entry is +1
    sign = next(s for s in out if s != 0)
    return tuple(sign * s for s in out)


@dataclass(frozen=True)
class ComplianceReport:
    compliant: bool
    witness: tuple[int, ...] | None
    L: int
    sequence: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "sequence": list(self.sequence),
            "compliant": self.compliant,
            "witness": list(self.witness) if self.witness is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def is_compliant(seq: CoeffSequence, L: int, cap: int = ENUM_CAP) -> ComplianceReport:
    """Decide exhaustively whether ``seq`` is compliant on ``L`` constraints.

    When it is not, the report carries a nonzero deviation configuration whose
    weighted sum vanishes.
    """
    _check_cap(L, cap)
    weights = integer_weights(seq, L)
    witness = _find_witness(weights)
    return ComplianceReport(witness is None, witness, L, tuple(str(c) for c in seq.take(L)))


def resonance_fraction(seq: CoeffSequence, L: int, cap: int = ENUM_CAP) -> Fraction:
    """Fraction of nonzero deviation configurations resonant with the target sector.

    The denominator is ``3**L``, the number of pseudogenerator eigenvalue
    labels ``s`` in ``{-1, 0, +1}^L``.
    """
    _check_cap(L, cap)
    return Fraction(zero_sum_count(integer_weights(seq, L)) - 1, 3**L)


def brute_force_zero_sums(seq: CoeffSequence, L: int) -> list[tuple[int, ...]]:
    """All nonzero ``s`` with vanishing weighted sum, by plain enumeration.

    Every configuration is enumerated; candidates are screened in floating
    point and each hit is confirmed in exact rational arithmetic.
    """
    coeffs = seq.take(L)
    grid = np.array(list(itertools.product((-1, 0, 1), repeat=L)), dtype=np.int8).reshape(-1, L)
    approx = grid @ np.array([float(c) for c in coeffs])
    scale = max(abs(float(c)) for c in coeffs)
    hits = []
    for row in grid[np.abs(approx) <= 1e-9 * scale]:
        s = tuple(int(x) for x in row)
        if any(s) and sum(c * x for c, x in zip(coeffs, s)) == 0:
            hits.append(s)
    return hits
