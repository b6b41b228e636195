"""Hilbert space and operator builders for the (1+1)D Z2 lattice gauge theory.

Basis ordering
--------------
A basis state is a pair ``(m, l)`` of integers. Bit ``j-1`` of ``m`` is the
occupation ``n_j`` of matter site ``j``; bit ``j-1`` of ``l`` is set when the
electric field on link ``(j, j+1)`` is ``tau^x = -1`` (cleared means ``+1``,
drawn as a right arrow). Allowed matter configurations are sorted ascending
(optionally restricted to ``N`` particles) and the flat index is
``rank(m) * 2**L + l``.

In this basis the electric field, the occupations, the gauge generators, the
pseudogenerators and the target projector are all diagonal. The gauge
connection ``tau^z`` flips a link bit.

Sites, links and constraints carry 1-based labels ``j = 1..L``. Link ``j``
joins sites ``j`` and ``j+1`` (mod ``L`` for periodic chains); for open chains
link ``L`` dangles at the right end and the constraint at ``j = 1`` sees a
fictitious left link frozen to ``+1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, SectorError

__all__ = [
    "DEFAULT_ALPHAS",
    "DIM_CAP",
    "LatticeSpec",
    "ModelParams",
    "HilbertSpace",
    "build_hilbert_space",
    "build_ideal_hamiltonian",
    "build_hopping",
    "build_field_term",
    "build_gauge_generator",
    "gauge_generator_diagonal",
    "build_lpg",
    "lpg_diagonal",
    "build_protection",
    "build_analog_error",
    "build_circuit_error",
    "build_error",
    "build_target_projector",
    "target_mask",
    "build_adjusted_hamiltonian",
    "build_hamiltonian",
    "build_initial_state",
    "named_pattern",
    "is_hermitian",
    "max_commutator",
]

DIM_CAP = 2**20
DEFAULT_ALPHAS = (0.5110, -0.4953, 0.7696, 0.2147)

# Link operators in the stored tau^x eigenbasis (index 0 <-> +1, 1 <-> -1).
TAU_X = np.array([[1.0, 0.0], [0.0, -1.0]])
TAU_Z = np.array([[0.0, 1.0], [1.0, 0.0]])
TAU_Y = 1j * TAU_X @ TAU_Z
# Raising/lowering of tau^z; both come out real in this basis.
TAU_PLUS = np.real((TAU_X + 1j * TAU_Y) / 2)
TAU_MINUS = np.real((TAU_X - 1j * TAU_Y) / 2)


@dataclass(frozen=True)
class LatticeSpec:
    """Chain geometry and target gauge sector.

    ``target_sector`` defaults to ``g_j = +1`` everywhere.
    """

    n_matter: int
    boundary: str = "periodic"
    target_sector: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n_matter < 1:
            raise ValueError("n_matter must be positive")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        if self.target_sector is None:
            object.__setattr__(self, "target_sector", (1,) * self.n_matter)
        tar = tuple(int(g) for g in self.target_sector)
        if len(tar) != self.n_matter:
            raise ValueError("target_sector length must equal n_matter")
        if any(g not in (-1, 1) for g in tar):
            raise ValueError("target_sector entries must be +1 or -1")
        object.__setattr__(self, "target_sector", tar)

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour bonds ``(j, j+1)`` as 1-based site pairs.

        The bond ``(j, k)`` is mediated by link ``j``.
        """
        L = self.n_matter
        out = [(j, j + 1) for j in range(1, L)]
        if self.periodic and L > 1:
            out.append((L, 1))
        return out


@dataclass(frozen=True)
class ModelParams:
    """Couplings in units of ``J``."""

    J: float = 1.0
    h: float = 0.3
    lam: float = 0.0
    V: float = 0.0
    alphas: tuple[float, float, float, float] = DEFAULT_ALPHAS
    error_model: str = "analog"

    def __post_init__(self):
        if self.J <= 0:
            raise ValueError("J must be positive")
        if self.error_model not in ("analog", "circuit"):
            raise ValueError(f"unknown error_model {self.error_model!r}")
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) != 4:
            raise ValueError("alphas must have four entries")
        if self.error_model == "analog" and abs(sum(alphas) - 1.0) > 1e-3:
            raise ValueError(f"analog alphas must sum to 1 (got {sum(alphas):.6f})")
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True, eq=False)
class HilbertSpace:
    """Enumerated product basis; see the module docstring for the ordering."""

    spec: LatticeSpec
    sector: int | None
    matter_states: np.ndarray
    occupations: np.ndarray = field(repr=False)
    link_values: np.ndarray = field(repr=False)
    _matter_rank: np.ndarray = field(repr=False)

    @property
    def L(self) -> int:
        return self.spec.n_matter

    @property
    def dim(self) -> int:
        return self.occupations.shape[0]

    @property
    def matter_ints(self) -> np.ndarray:
        return np.repeat(self.matter_states, 2**self.L)

    @property
    def link_ints(self) -> np.ndarray:
        return np.tile(np.arange(2**self.L, dtype=np.int64), len(self.matter_states))

    def index(self, matter: np.ndarray, links: np.ndarray) -> np.ndarray:
        """Flat indices for integer-encoded matter and link configurations.

        Returns -1 where the matter configuration is outside the sector.
        """
        rank = self._matter_rank[np.asarray(matter)]
        return np.where(rank >= 0, rank * 2**self.L + np.asarray(links), -1)

    def basis_index(self, occupations: Sequence[int], links: Sequence[int]) -> int:
        """Index of the product state with given occupations and ``tau^x`` values."""
        L = self.L
        if len(occupations) != L or len(links) != L:
            raise ValueError(f"expected {L} occupations and {L} link values")
        m = sum(int(n) << j for j, n in enumerate(occupations))
        l = sum((1 << j) for j, x in enumerate(links) if int(x) == -1)
        idx = int(self.index(np.array([m]), np.array([l]))[0])
        if idx < 0:
            raise SectorError(f"occupations {tuple(occupations)} outside particle-number sector {self.sector}")
        return idx

    def left_links(self) -> np.ndarray:
        """``tau^x`` on the link to the left of every site, shape ``(D, L)``."""
        left = np.roll(self.link_values, 1, axis=1)
        if not self.spec.periodic:
            left[:, 0] = 1
        return left


def build_hilbert_space(spec: LatticeSpec, sector: int | None = None, cap: int = DIM_CAP) -> HilbertSpace:
    """Enumerate the matter x link product basis, optionally at fixed particle number."""
    L = spec.n_matter
    if L < 2:
        raise ValueError("need at least two matter sites")
    if sector is not None and not 0 <= sector <= L:
        raise ValueError(f"particle number {sector} outside [0, {L}]")
    n_matter = 2**L if sector is None else comb(L, sector)
    dim = n_matter * 2**L
    if dim > cap:
        raise CapacityError(f"dimension {dim} exceeds cap {cap}")

    all_m = np.arange(2**L, dtype=np.int64)
    bits = (all_m[:, None] >> np.arange(L)) & 1
    if sector is None:
        matter = all_m
    else:
        matter = all_m[bits.sum(axis=1) == sector]
    rank = np.full(2**L, -1, dtype=np.int64)
    rank[matter] = np.arange(len(matter))

    links = np.arange(2**L, dtype=np.int64)
    link_bits = (links[:, None] >> np.arange(L)) & 1
    occ = np.repeat(bits[matter], 2**L, axis=0).astype(np.int8)
    tx = np.tile(1 - 2 * link_bits, (len(matter), 1)).astype(np.int8)
    return HilbertSpace(spec, sector, matter, occ, tx, rank)


def _check_site(space: HilbertSpace, j: int) -> None:
    if not 1 <= j <= space.L:
        raise IndexError(f"site index {j} outside 1..{space.L}")


def _diag(values: np.ndarray) -> sp.csr_matrix:
    return sp.diags(np.asarray(values, dtype=float), format="csr")


def build_hopping(space: HilbertSpace, bond: tuple[int, int], link_op: np.ndarray) -> sp.csr_matrix:
    """Matrix of ``a_j^dag M a_k`` for the bond ``(j, k)``, with ``M`` acting on link ``j``.

    ``link_op`` is a 2x2 matrix in the stored link basis; pass the identity for
    a hop that leaves the link untouched. The Hermitian conjugate is not added.
    """
    j, k = bond
    link_op = np.asarray(link_op)
    src = np.flatnonzero((space.occupations[:, j - 1] == 0) & (space.occupations[:, k - 1] == 1))
    m = space.matter_ints[src] ^ ((1 << (j - 1)) | (1 << (k - 1)))
    l = space.link_ints[src]
    b_in = (l >> (j - 1)) & 1
    rows, cols, vals = [], [], []
    for b_out in (0, 1):
        amp = link_op[b_out, b_in]
        keep = amp != 0
        l_out = (l & ~(1 << (j - 1))) | (b_out << (j - 1))
        dst = space.index(m[keep], l_out[keep])
        rows.append(dst)
        cols.append(src[keep])
        vals.append(amp[keep])
    rows, cols, vals = (np.concatenate(x) for x in (rows, cols, vals))
    return sp.csr_matrix((vals, (rows, cols)), shape=(space.dim, space.dim))


def _link_flip(space: HilbertSpace, j: int, weights: np.ndarray | None = None) -> sp.csr_matrix:
    """``diag(weights) * tau^z`` on link ``j`` (flip the stored bit)."""
    src = np.arange(space.dim)
    dst = space.index(space.matter_ints, space.link_ints ^ (1 << (j - 1)))
    vals = np.ones(space.dim) if weights is None else np.asarray(weights, dtype=float)
    keep = vals != 0
    return sp.csr_matrix((vals[keep], (dst[keep], src[keep])), shape=(space.dim, space.dim))


def build_field_term(space: HilbertSpace) -> sp.csr_matrix:
    """``sum_j tau^x_{j,j+1}`` over all ``L`` links."""
    return _diag(space.link_values.sum(axis=1))


def build_ideal_hamiltonian(space: HilbertSpace, J: float = 1.0, h: float = 0.3) -> sp.csr_matrix:
    """Gauge-assisted hopping plus electric field term, ``H_0``."""
    hop = sp.csr_matrix((space.dim, space.dim))
    for bond in space.spec.bonds():
        hop = hop + build_hopping(space, bond, TAU_Z)
    hop = hop + hop.T.conj()
    return (-J * hop - h * build_field_term(space)).tocsr()


def gauge_generator_diagonal(space: HilbertSpace, j: int) -> np.ndarray:
    """Eigenvalues ``(-1)^{n_j} tau^x_{j-1,j} tau^x_{j,j+1}`` on every basis state."""
    _check_site(space, j)
    left = space.left_links()[:, j - 1]
    parity = 1 - 2 * space.occupations[:, j - 1].astype(np.int64)
    return parity * left * space.link_values[:, j - 1]


def build_gauge_generator(space: HilbertSpace, j: int) -> sp.csr_matrix:
    return _diag(gauge_generator_diagonal(space, j))


def lpg_diagonal(space: HilbertSpace, j: int, g_tar: int) -> np.ndarray:
    """Eigenvalues ``tau^x_{j-1,j} tau^x_{j,j+1} + 2 g_tar n_j`` of the pseudogenerator."""
    _check_site(space, j)
    if g_tar not in (-1, 1):
        raise ValueError("g_tar must be +1 or -1")
    left = space.left_links()[:, j - 1]
    return left * space.link_values[:, j - 1] + 2 * g_tar * space.occupations[:, j - 1].astype(np.int64)


def build_lpg(space: HilbertSpace, j: int, g_tar: int) -> sp.csr_matrix:
    return _diag(lpg_diagonal(space, j, g_tar))


def build_protection(space: HilbertSpace, seq, V: float = 1.0, target_sector: Sequence[int] | None = None) -> sp.csr_matrix:
    """``V * sum_j c_j (W_j - g_j^tar)`` over all ``L`` constraints.

    ``seq`` is a :class:`~z2lpg.sequences.CoeffSequence` (or any object with
    ``coefficient(j)``), or a plain list of coefficients extended periodically.
    """
    tar = space.spec.target_sector if target_sector is None else tuple(target_sector)
    diag = np.zeros(space.dim)
    for j in range(1, space.L + 1):
        c = _coefficient(seq, j)
        diag += c * (lpg_diagonal(space, j, tar[j - 1]) - tar[j - 1])
    return _diag(V * diag)


def _coefficient(seq, j: int) -> float:
    if hasattr(seq, "coefficient"):
        return float(seq.coefficient(j))
    seq = list(seq)
    return float(seq[(j - 1) % len(seq)])


def build_analog_error(space: HilbertSpace, alphas: Sequence[float] = DEFAULT_ALPHAS) -> sp.csr_matrix:
    """Floquet-type gauge-breaking error ``H_1`` (without the factor ``lambda``).

    ``tau^+`` and ``tau^-`` raise and lower ``tau^z``; the sum runs over the
    same bonds as the hopping in ``H_0``.
    """
    a1, a2, a3, a4 = alphas
    H = sp.csr_matrix((space.dim, space.dim))
    for j, k in space.spec.bonds():
        hop = a1 * build_hopping(space, (j, k), TAU_PLUS) + a2 * build_hopping(space, (j, k), TAU_MINUS)
        H = H + hop + hop.T.conj()
        w = a3 * space.occupations[:, j - 1] - a4 * space.occupations[:, k - 1]
        H = H + _link_flip(space, j, w)
    return H.tocsr()


def build_circuit_error(space: HilbertSpace) -> sp.csr_matrix:
    """Coherent circuit error ``sum_j tau^z_{j,j+1} + (sigma^+_j sigma^-_{j+1} + h.c.)``.

    Phase flips act on every link; the unassisted hop runs over the bonds.
    """
    H = sp.csr_matrix((space.dim, space.dim))
    for j in range(1, space.L + 1):
        H = H + _link_flip(space, j)
    eye = np.eye(2)
    for bond in space.spec.bonds():
        hop = build_hopping(space, bond, eye)
        H = H + hop + hop.T
    return H.tocsr()


def build_error(space: HilbertSpace, params: ModelParams) -> sp.csr_matrix:
    if params.error_model == "analog":
        return build_analog_error(space, params.alphas)
    return build_circuit_error(space)


def target_mask(space: HilbertSpace, target_sector: Sequence[int] | None = None) -> np.ndarray:
    """Boolean mask of basis states with ``G_j = g_j^tar`` for all ``j``."""
    tar = space.spec.target_sector if target_sector is None else tuple(target_sector)
    mask = np.ones(space.dim, dtype=bool)
    for j in range(1, space.L + 1):
        mask &= gauge_generator_diagonal(space, j) == tar[j - 1]
    return mask


def build_target_projector(space: HilbertSpace, target_sector: Sequence[int] | None = None) -> sp.csr_matrix:
    return _diag(target_mask(space, target_sector).astype(float))


def build_adjusted_hamiltonian(H0, H1, P0, lam: float) -> sp.csr_matrix:
    """``H_0 + lam * P_0 H_1 P_0``."""
    if not (H0.shape == H1.shape == P0.shape):
        raise ValueError(f"dimension mismatch: {H0.shape}, {H1.shape}, {P0.shape}")
    P0 = sp.csr_matrix(P0)
    return (sp.csr_matrix(H0) + lam * (P0 @ sp.csr_matrix(H1) @ P0)).tocsr()


def build_hamiltonian(space: HilbertSpace, params: ModelParams, seq, variant: str = "faulty") -> sp.csr_matrix:
    """Assemble ``H_0 + lam H_1 + V H_W`` (``faulty``), ``H_adj`` (``adjusted``) or ``H_0`` (``ideal``)."""
    H0 = build_ideal_hamiltonian(space, params.J, params.h)
    if variant == "ideal":
        return H0
    H1 = build_error(space, params)
    if variant == "adjusted":
        return build_adjusted_hamiltonian(H0, H1, build_target_projector(space), params.lam)
    if variant != "faulty":
        raise ValueError(f"unknown Hamiltonian variant {variant!r}")
    H = H0 + params.lam * H1
    if params.V != 0:
        H = H + build_protection(space, seq, params.V)
    return H.tocsr()


def named_pattern(name: str, spec: LatticeSpec) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Occupations and link values of a named half-filled product state.

    Links follow from Gauss's law, seeded by the fictitious ``+1`` left link
    for open chains and by ``tau^x_{L,1} = -1`` for periodic chains (which
    reproduces the four-site unit cells used for the periodic quenches).
    """
    L = spec.n_matter
    if name == "staggered":
        occ = tuple((j + 1) % 2 for j in range(L))
    elif name == "cdw":
        occ = tuple(1 if j % 4 in (0, 1) else 0 for j in range(L))
    elif name == "domain_wall":
        occ = tuple(1 if j < L // 2 else 0 for j in range(L))
    else:
        raise ValueError(f"unknown pattern {name!r}")
    tar = spec.target_sector
    x = 1 if not spec.periodic else -1
    links = []
    for j in range(L):
        x = tar[j] * (1 - 2 * occ[j]) * x
        links.append(x)
    return occ, tuple(links)


def _violated(spec: LatticeSpec, occ, links) -> list[int]:
    L = spec.n_matter
    bad = []
    for j in range(L):
        left = links[j - 1] if (j > 0 or spec.periodic) else 1
        g = (1 - 2 * occ[j]) * left * links[j]
        if g != spec.target_sector[j]:
            bad.append(j + 1)
    return bad


def build_initial_state(space: HilbertSpace, pattern) -> np.ndarray:
    """Product basis state for a named pattern or an explicit ``(occupations, links)`` pair.

    Raises
    ------
    SectorError
        If the configuration violates any target-sector constraint; the
        message lists the violated 1-based constraint labels.
    """
    spec = space.spec
    if isinstance(pattern, str):
        occ, links = named_pattern(pattern, spec)
    else:
        occ, links = (tuple(int(v) for v in p) for p in pattern)
    L = spec.n_matter
    if len(occ) != L or len(links) != L:
        raise ValueError(f"pattern length must be {L}")
    if any(n not in (0, 1) for n in occ) or any(x not in (-1, 1) for x in links):
        raise ValueError("occupations must be 0/1 and link values +1/-1")
    bad = _violated(spec, occ, links)
    if bad:
        raise SectorError(f"pattern violates target-sector constraints at j = {bad}", violated=bad)
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.basis_index(occ, links)] = 1.0
    return psi


def is_hermitian(M, atol: float = 1e-12) -> bool:
    D = M - M.conj().T
    if sp.issparse(D):
        return D.nnz == 0 or abs(D).max() < atol
    return np.abs(D).max() < atol


def max_commutator(A, B) -> float:
    """Largest absolute entry of ``[A, B]``."""
    C = A @ B - B @ A
    if sp.issparse(C):
        C = C.tocsr()
        C.eliminate_zeros()
        return float(abs(C).max()) if C.nnz else 0.0
    return float(np.abs(C).max())
