"""Gauge violation, staggered occupation and electric flux.

Every observable here is diagonal in the product basis, so expectation values
reduce to weighted sums of ``|psi_i|^2``. Functions accept a single state of
shape ``(D,)`` or a stack of states of shape ``(T, D)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .lattice import HilbertSpace, gauge_generator_diagonal

__all__ = [
    "generator_table",
    "generator_expectations",
    "gauge_violation_instant",
    "temporal_average",
    "staggered_occupation",
    "electric_flux",
    "diagonal_expectation",
]


def _probs(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    return state.real**2 + state.imag**2 if np.iscomplexobj(state) else state**2


def diagonal_expectation(state: np.ndarray, diag: np.ndarray) -> np.ndarray | float:
    """``<psi| diag |psi>`` for one state or a stack of states."""
    out = _probs(state) @ np.asarray(diag, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def generator_table(space: HilbertSpace) -> np.ndarray:
    """Eigenvalues of ``G_1..G_L`` on every basis state, shape ``(D, L)``."""
    return np.stack([gauge_generator_diagonal(space, j) for j in range(1, space.L + 1)], axis=1).astype(float)


def generator_expectations(space: HilbertSpace, state: np.ndarray, table: np.ndarray | None = None) -> np.ndarray:
    """``<G_j>`` for ``j = 1..L``; shape ``(L,)`` or ``(T, L)``."""
    table = generator_table(space) if table is None else table
    return _probs(state) @ table


def gauge_violation_instant(
    space: HilbertSpace,
    state: np.ndarray,
    target_sector: Sequence[int] | None = None,
    mode: str = "all_sites",
    table: np.ndarray | None = None,
) -> np.ndarray | float:
    """Instantaneous violation ``1 - mean_j g_j^tar <G_j>``.

    ``mode="all_sites"`` averages over all ``L`` constraints; ``"interior"``
    averages over ``j = 2..L`` with weight ``1/(L-1)``, the raw violation used
    for open circuits.
    """
    tar = np.asarray(space.spec.target_sector if target_sector is None else target_sector, dtype=float)
    g = generator_expectations(space, state, table) * tar
    if mode == "all_sites":
        val = 1.0 - g.mean(axis=-1)
    elif mode == "interior":
        val = 1.0 - g[..., 1:].sum(axis=-1) / (space.L - 1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(val) if np.ndim(val) == 0 else val


def temporal_average(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Running time average ``(1/t) int_0^t v(s) ds`` by the trapezoidal rule.

    The sampled times must start at 0 and increase strictly; the average at
    ``t = 0`` is defined as 0.
    """
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.shape != values.shape:
        raise ValueError("values and times must be 1-D arrays of equal length")
    if times[0] != 0.0:
        raise ValueError("times must start at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    integral = cumulative_trapezoid(values, times, initial=0.0)
    out = np.zeros_like(values)
    out[1:] = integral[1:] / times[1:]
    return out


def staggered_occupation(space: HilbertSpace, state: np.ndarray) -> np.ndarray | float:
    """``(1/L) sum_j (-1)^j <n_j>`` with sites counted from ``j = 1``."""
    signs = (-1.0) ** np.arange(1, space.L + 1)
    return diagonal_expectation(state, space.occupations @ signs / space.L)


def electric_flux(space: HilbertSpace, state: np.ndarray) -> np.ndarray | float:
    """``(1/L) sum_j <tau^x_{j,j+1}>`` over all ``L`` links."""
    return diagonal_expectation(state, space.link_values.sum(axis=1) / space.L)
