"""Continuous-time quench evolution by full diagonalization or Lanczos stepping."""

from __future__ import annotations

import weakref
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, eigh_tridiagonal

from . import observables as obs
from .errors import CapacityError, ConvergenceError, SectorError
from .lattice import HilbertSpace, ModelParams, build_hamiltonian, is_hermitian, target_mask
from .timeseries import TimeSeries

__all__ = [
    "DENSE_CAP",
    "QuenchConfig",
    "SpectralPropagator",
    "spectral_propagator",
    "evolve_dense",
    "evolve_krylov",
    "krylov_propagate",
    "sample_times",
    "series_from_states",
    "run_quench",
]

DENSE_CAP = 4096


@dataclass(frozen=True)
class QuenchConfig:
    t_max: float = 10.0
    sample_interval: float = 0.01
    engine: str = "dense"
    krylov_dim: int = 30
    krylov_tol: float = 1e-12

    def __post_init__(self):
        if not 0 < self.sample_interval <= self.t_max:
            raise ValueError("need 0 < sample_interval <= t_max")
        if self.engine not in ("dense", "krylov"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.krylov_dim < 4:
            raise ValueError("krylov_dim must be at least 4")


class SpectralPropagator:
    """``exp(-iHt)`` from one Hermitian eigendecomposition of ``H``."""

    def __init__(self, H, cap: int = DENSE_CAP):
        if H.shape[0] > cap:
            raise CapacityError(f"dense propagation limited to D <= {cap}, got {H.shape[0]}")
        if not is_hermitian(H):
            raise ValueError("Hamiltonian is not Hermitian")
        Hd = H.toarray() if sp.issparse(H) else np.asarray(H)
        self.energies, self.vectors = eigh(Hd)

    def evolve(self, psi0: np.ndarray, times) -> np.ndarray:
        """States at each time in ``times``; shape ``(T, D)`` (or ``(D,)`` for a scalar)."""
        scalar = np.ndim(times) == 0
        times = np.atleast_1d(np.asarray(times, dtype=float))
        c0 = self.vectors.conj().T @ psi0
        phases = np.exp(-1j * np.outer(times, self.energies))
        out = (phases * c0) @ self.vectors.T
        # t = 0 returns the input exactly rather than up to round-off
        out[times == 0] = psi0
        return out[0] if scalar else out


_cache: dict[int, tuple[weakref.ref, SpectralPropagator]] = {}


def spectral_propagator(H) -> SpectralPropagator:
    """Cached :class:`SpectralPropagator` for ``H`` (keyed by object identity)."""
    key = id(H)
    hit = _cache.get(key)
    if hit is not None and hit[0]() is H:
        return hit[1]
    prop = SpectralPropagator(H)
    _cache[key] = (weakref.ref(H, lambda _, k=key: _cache.pop(k, None)), prop)
    return prop


def evolve_dense(H, psi0: np.ndarray, t) -> np.ndarray:
    """``exp(-iHt) psi0`` by exact diagonalization (eigensystem cached per ``H``)."""
    return spectral_propagator(H).evolve(psi0, t)


def _small_exp(alpha: np.ndarray, beta: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i T dt) e_1`` for the tridiagonal ``T(alpha, beta)``."""
    if len(alpha) == 1:
        return np.array([np.exp(-1j * alpha[0] * dt)])
    evals, evecs = eigh_tridiagonal(alpha, beta)
    return evecs @ (np.exp(-1j * evals * dt) * evecs[0])


def _lanczos_exp(H, psi: np.ndarray, dt: float, m: int, tol: float) -> tuple[np.ndarray, float]:
    """One Krylov step; returns the propagated vector and an error estimate.

    The iteration stops early once the residual estimate
    ``beta_k |(exp(-iT dt) e_1)_k|`` drops below ``tol``.
    """
    nrm = np.linalg.norm(psi)
    D = psi.shape[0]
    m = min(m, D)
    V = np.zeros((m, D), dtype=complex)
    alpha = np.zeros(m)
    beta = np.zeros(m)
    V[0] = psi / nrm
    for k in range(m):
        w = H @ V[k]
        alpha[k] = np.vdot(V[k], w).real
        # full reorthogonalization, applied twice
        for _ in range(2):
            w -= V[: k + 1].T @ (V[: k + 1].conj() @ w)
        b = np.linalg.norm(w)
        n = k + 1
        if b < 1e-13 * max(1.0, abs(alpha[k])):
            c = _small_exp(alpha[:n], beta[: n - 1], dt)
            return nrm * (V[:n].T @ c), 0.0
        beta[k] = b
        if n >= 4 or n == m:
            c = _small_exp(alpha[:n], beta[: n - 1], dt)
            err = b * abs(c[-1])
            if err <= tol or n == m:
                return nrm * (V[:n].T @ c), float(err)
        V[k + 1] = w / b
    raise AssertionError("unreachable")


def evolve_krylov(H, psi: np.ndarray, dt: float, krylov_dim: int = 30, tol: float = 1e-12, max_halvings: int = 10) -> np.ndarray:
    """Propagate ``psi`` by ``dt`` with a reorthogonalized Lanczos approximation.

    Steps whose residual estimate exceeds ``tol`` are split in half,
    recursively, up to ``max_halvings`` times.
    """
    if krylov_dim < 4:
        raise ValueError("krylov_dim must be at least 4")

    def step(vec, tau, depth):
        out, err = _lanczos_exp(H, vec, tau, krylov_dim, tol)
        if err <= tol:
            return out
        if depth >= max_halvings:
            raise ConvergenceError(f"Lanczos step did not converge after {max_halvings} halvings (err={err:.2e})")
        half = step(vec, tau / 2, depth + 1)
        return step(half, tau / 2, depth + 1)

    return step(np.asarray(psi, dtype=complex), float(dt), 0)


def krylov_propagate(H, psi0: np.ndarray, times: np.ndarray, krylov_dim: int = 30, tol: float = 1e-12) -> np.ndarray:
    """States at each of the increasing ``times`` by successive Krylov steps."""
    out = np.empty((len(times), len(psi0)), dtype=complex)
    psi = np.asarray(psi0, dtype=complex)
    prev = 0.0
    for k, t in enumerate(times):
        if t > prev:
            psi = evolve_krylov(H, psi, t - prev, krylov_dim, tol)
            prev = t
        out[k] = psi
    return out


def sample_times(t_max: float, interval: float) -> np.ndarray:
    n = int(round(t_max / interval))
    return np.arange(n + 1) * interval


def series_from_states(space: HilbertSpace, H, states: np.ndarray, times: np.ndarray, metadata: dict | None = None, table=None) -> TimeSeries:
    """Evaluate every column of a :class:`TimeSeries` on a stack of states."""
    table = obs.generator_table(space) if table is None else table
    g = obs.generator_expectations(space, states, table)
    tar = np.asarray(space.spec.target_sector, dtype=float)
    inst = obs.gauge_violation_instant(space, states, mode="all_sites", table=table)
    raw = obs.gauge_violation_instant(space, states, mode="interior", table=table)
    energy = np.einsum("ij,ij->i", states.conj(), (H @ states.T).T).real
    return TimeSeries(
        t=times,
        sumG=(g * tar).sum(axis=1),
        eps_avg=obs.temporal_average(inst, times),
        eps_raw=raw,
        n_stag=obs.staggered_occupation(space, states),
        E=obs.electric_flux(space, states),
        energy=energy,
        norm=np.linalg.norm(states, axis=1),
        metadata=metadata or {},
    )


def run_quench(
    space: HilbertSpace,
    params: ModelParams,
    seq,
    psi0: np.ndarray,
    config: QuenchConfig = QuenchConfig(),
    variant: str = "faulty",
    metadata: dict | None = None,
) -> TimeSeries:
    """Quench ``psi0`` with the faulty, adjusted or ideal Hamiltonian and sample observables.

    The time-averaged violation column integrates the instantaneous violation
    over the sampling grid with the trapezoidal rule.
    """
    mask = target_mask(space)
    if np.linalg.norm(np.asarray(psi0)[~mask]) > 1e-10:
        raise SectorError("initial state is not in the target gauge sector")
    H = build_hamiltonian(space, params, seq, variant)
    times = sample_times(config.t_max, config.sample_interval)
    if config.engine == "dense":
        states = SpectralPropagator(H).evolve(psi0, times)
    else:
        states = krylov_propagate(H, psi0, times, config.krylov_dim, config.krylov_tol)
    meta = {
        "kind": "quench",
        "variant": variant,
        "params": asdict(params),
        "quench": asdict(config),
        "lattice": {"L": space.L, "boundary": space.spec.boundary, "sector": space.sector},
        "sequence": list(seq.as_strings()) if hasattr(seq, "as_strings") else [str(c) for c in seq],
    }
    meta.update(metadata or {})
    return series_from_states(space, H, states, times, meta)
