"""Statevector simulation of the layered first-order Trotter circuit.

Register layout: ``2L`` qubits alternating matter and gauge, qubit
``2(j-1)`` is matter site ``j`` and qubit ``2j-1`` is link ``(j, j+1)``.
Matter qubits store the occupation ``n_j`` (so ``sigma^z = 2n - 1``); gauge
qubits store the electric field in the ``tau^x`` eigenbasis (value 0 is
``tau^x = +1``), the same convention as :mod:`z2lpg.lattice`.

One Trotter step applies, in order,

* ``H_J``: exact three-qubit hopping blocks, even bonds then odd bonds,
* ``H_h``: ``Rx(-2 h dt)`` on every link,
* error: ``GaugePhaseFlip(2 lam dt)`` on every link, then two-qubit matter
  hops ``exp(-i lam dt (XX + YY)/2)`` on even and odd bonds,
* protection: ``Rz(2 c_j V g_j dt)`` on every matter qubit, ``XX(c_j V dt)``
  on the link pair flanking site ``j = 2..L``, and ``Rx(2 c_1 V dt)`` on link 1
  for the constraint at ``j = 1`` with its fictitious ``+1`` left link.

Bond parity counts bonds from 0, so the "even" sublayer holds bonds
``(1,2), (3,4), ...``. Constant offsets of the protection term cancel and
gates with zero angle are omitted.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import SectorError
from .evolve import series_from_states
from .lattice import HilbertSpace, ModelParams, build_hamiltonian, target_mask
from .observables import generator_table
from .timeseries import TimeSeries

__all__ = [
    "GATE_KINDS",
    "Gate",
    "TrotterStep",
    "CircuitConfig",
    "matter_qubit",
    "link_qubit",
    "compile_step",
    "apply_gate",
    "apply_step",
    "step_matrix",
    "register_permutation",
    "to_register",
    "from_register",
    "run_circuit",
    "ideal_protection_strength",
    "scan_final_violation",
    "to_netlist",
    "parse_netlist",
]

GATE_KINDS = ("Rx", "Rz", "XX", "HoppingBlock", "TwoQubitMatterHop", "GaugePhaseFlip")
_ARITY = {"Rx": 1, "Rz": 1, "XX": 2, "HoppingBlock": 3, "TwoQubitMatterHop": 2, "GaugePhaseFlip": 1}
LAYERS = ("H_J", "H_h", "error", "protection")


def matter_qubit(j: int) -> int:
    return 2 * (j - 1)


def link_qubit(j: int) -> int:
    return 2 * j - 1


def _hop_block(theta: float, sign: float, with_link: bool) -> np.ndarray:
    # K = a_j^dag [tau^z] a_k + h.c. satisfies K^2 = P (one of the two sites occupied),
    # so exp(i sign theta K) = 1 - P + cos(theta) P + i sign sin(theta) K.
    if with_link:
        n = 8
        idx = lambda nj, b, nk: (nj << 2) | (b << 1) | nk  # noqa: E731
        K = np.zeros((n, n))
        for b in (0, 1):
            K[idx(1, 1 - b, 0), idx(0, b, 1)] = 1.0
            K[idx(0, 1 - b, 1), idx(1, b, 0)] = 1.0
    else:
        n = 4
        K = np.zeros((n, n))
        K[0b10, 0b01] = K[0b01, 0b10] = 1.0
    P = K @ K
    return np.eye(n) - P + np.cos(theta) * P + 1j * sign * np.sin(theta) * K


@dataclass(frozen=True)
class Gate:
    """A named unitary on a tuple of register qubits.

    Angle conventions: ``Rx``/``Rz``/``GaugePhaseFlip`` are
    ``exp(-i A phi / 2)`` for ``A = tau^x, sigma^z, tau^z``; ``XX`` is
    ``exp(-i theta tau^x tau^x)``; ``HoppingBlock`` is
    ``exp(+i theta (sigma^+ tau^z sigma^- + h.c.))`` on (matter, link, matter);
    ``TwoQubitMatterHop`` is ``exp(-i theta (sigma^+ sigma^- + h.c.))``.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubits, got {self.targets}")
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "angle", float(self.angle))

    @property
    def matrix(self) -> np.ndarray:
        a = self.angle
        if self.kind == "Rx":
            return np.diag(np.exp([-0.5j * a, 0.5j * a]))
        if self.kind == "Rz":
            return np.diag(np.exp([0.5j * a, -0.5j * a]))
        if self.kind == "XX":
            return np.diag(np.exp([-1j * a, 1j * a, 1j * a, -1j * a]))
        if self.kind == "GaugePhaseFlip":
            c, s = np.cos(a / 2), np.sin(a / 2)
            return np.array([[c, -1j * s], [-1j * s, c]])
        if self.kind == "HoppingBlock":
            return _hop_block(a, +1.0, True)
        return _hop_block(a, -1.0, False)


@dataclass
class TrotterStep:
    gates: list[Gate]
    layers: dict[str, tuple[int, int]]
    n_qubits: int

    def layer(self, name: str) -> list[Gate]:
        lo, hi = self.layers[name]
        return self.gates[lo:hi]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out


@dataclass(frozen=True)
class CircuitConfig:
    dt: float = 0.2
    n_steps: int = 100
    params: ModelParams = field(default_factory=lambda: ModelParams(lam=0.1, error_model="circuit"))
    seq: object = None
    sample_every: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.sample_every < 1:
            raise ValueError("sample_every must be at least 1")


def _bond_sublayers(L: int) -> list[list[int]]:
    bonds = list(range(1, L))
    return [bonds[0::2], bonds[1::2]]


def compile_step(space: HilbertSpace, params: ModelParams, seq, dt: float) -> TrotterStep:
    """Gate list of one Trotter step (see the module docstring for the layout)."""
    spec = space.spec
    if spec.periodic:
        raise ValueError("circuit mode supports open boundaries only")
    L = spec.n_matter
    tar = spec.target_sector
    gates: list[Gate] = []
    layers: dict[str, tuple[int, int]] = {}

    def add(g: Gate):
        if g.angle != 0.0:
            gates.append(g)

    start = len(gates)
    for sub in _bond_sublayers(L):
        for j in sub:
            add(Gate("HoppingBlock", (matter_qubit(j), link_qubit(j), matter_qubit(j + 1)), params.J * dt))
    layers["H_J"] = (start, len(gates))

    start = len(gates)
    for j in range(1, L + 1):
        add(Gate("Rx", (link_qubit(j),), -2 * params.h * dt))
    layers["H_h"] = (start, len(gates))

    start = len(gates)
    for j in range(1, L + 1):
        add(Gate("GaugePhaseFlip", (link_qubit(j),), 2 * params.lam * dt))
    for sub in _bond_sublayers(L):
        for j in sub:
            add(Gate("TwoQubitMatterHop", (matter_qubit(j), matter_qubit(j + 1)), params.lam * dt))
    layers["error"] = (start, len(gates))

    start = len(gates)
    if params.V != 0:
        c = [float(seq.coefficient(j)) for j in range(1, L + 1)]
        for j in range(1, L + 1):
            add(Gate("Rz", (matter_qubit(j),), 2 * c[j - 1] * params.V * tar[j - 1] * dt))
        for j in range(2, L + 1):
            add(Gate("XX", (link_qubit(j - 1), link_qubit(j)), c[j - 1] * params.V * dt))
        add(Gate("Rx", (link_qubit(1),), 2 * c[0] * params.V * dt))
    layers["protection"] = (start, len(gates))
    return TrotterStep(gates, layers, 2 * L)


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply ``gate`` to a register tensor of shape ``(2,) * n``; returns a new tensor."""
    n = state.ndim
    if any(not 0 <= q < n for q in gate.targets):
        raise IndexError(f"gate targets {gate.targets} outside register of {n} qubits")
    k = len(gate.targets)
    U = gate.matrix.reshape((2,) * (2 * k))
    out = np.tensordot(U, state, axes=(list(range(k, 2 * k)), list(gate.targets)))
    return np.moveaxis(out, list(range(k)), list(gate.targets))


def apply_step(state: np.ndarray, step: TrotterStep) -> np.ndarray:
    for g in step.gates:
        state = apply_gate(state, g)
    return state


def step_matrix(gates: Iterable[Gate], n_qubits: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of a gate sequence in register ordering."""
    gates = list(gates)
    dim = 2**n_qubits
    cols = np.eye(dim, dtype=complex).reshape((2,) * n_qubits + (dim,))
    for g in gates:
        k = len(g.targets)
        U = g.matrix.reshape((2,) * (2 * k))
        cols = np.moveaxis(np.tensordot(U, cols, axes=(list(range(k, 2 * k)), list(g.targets))), list(range(k)), list(g.targets))
    return cols.reshape(dim, dim)


def register_permutation(space: HilbertSpace) -> np.ndarray:
    """Register flat index (qubit 0 most significant) of every basis state of ``space``."""
    L = space.L
    bits = np.empty((space.dim, 2 * L), dtype=np.int64)
    bits[:, 0::2] = space.occupations
    bits[:, 1::2] = (1 - space.link_values) // 2
    weights = 2 ** np.arange(2 * L - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def to_register(space: HilbertSpace, psi: np.ndarray) -> np.ndarray:
    reg = np.zeros(2 ** (2 * space.L), dtype=complex)
    reg[register_permutation(space)] = psi
    return reg.reshape((2,) * (2 * space.L))


def from_register(space: HilbertSpace, reg: np.ndarray) -> np.ndarray:
    return reg.reshape(-1)[register_permutation(space)]


def run_circuit(space: HilbertSpace, config: CircuitConfig, psi0: np.ndarray, metadata: dict | None = None) -> TimeSeries:
    """Apply ``n_steps`` Trotter steps to ``psi0``, sampling every ``sample_every`` steps.

    Samples sit at ``t = k dt``. The time-averaged violation column is the
    trapezoidal average over the sampled points only.
    """
    if np.linalg.norm(np.asarray(psi0)[~target_mask(space)]) > 1e-10:
        raise SectorError("initial state is not in the target gauge sector")
    params = config.params
    step = compile_step(space, params, config.seq, config.dt)
    reg = to_register(space, np.asarray(psi0, dtype=complex))
    states = [from_register(space, reg)]
    times = [0.0]
    for k in range(1, config.n_steps + 1):
        reg = apply_step(reg, step)
        if k % config.sample_every == 0:
            states.append(from_register(space, reg))
            times.append(k * config.dt)
    H = build_hamiltonian(space, params, config.seq)
    meta = {
        "kind": "circuit",
        "params": asdict(params),
        "circuit": {"dt": config.dt, "n_steps": config.n_steps, "sample_every": config.sample_every},
        "lattice": {"L": space.L, "boundary": space.spec.boundary, "sector": space.sector},
        "sequence": list(config.seq.as_strings()) if config.seq is not None else None,
    }
    meta.update(metadata or {})
    return series_from_states(space, H, np.array(states), np.array(times), meta, table=generator_table(space))


def ideal_protection_strength(dt: float) -> float:
    """Protection strength ``pi / (2 dt)`` beyond which gate angles alias."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return np.pi / (2 * dt)


def scan_final_violation(
    space: HilbertSpace,
    template: CircuitConfig,
    V_list: Sequence[float],
    psi0: np.ndarray,
    t_final: float = 20.0,
) -> list[tuple[float, float]]:
    """Raw violation at ``t_final`` for each protection strength, sorted by ``V``."""
    n_steps = int(round(t_final / template.dt))
    rows = []
    for V in sorted(V_list):
        if V <= 0:
            raise ValueError("V values must be positive")
        params = ModelParams(**{**asdict(template.params), "V": float(V)})
        cfg = CircuitConfig(template.dt, n_steps, params, template.seq, sample_every=n_steps)
        rows.append((float(V), float(run_circuit(space, cfg, psi0).eps_raw[-1])))
    return rows


def to_netlist(step: TrotterStep) -> str:
    """One gate per line: ``kind targets angle`` with comma-separated qubit indices."""
    lines = [f"# qubits {step.n_qubits}"]
    for name in LAYERS:
        lo, hi = step.layers[name]
        lines.append(f"# layer {name}")
        for g in step.gates[lo:hi]:
            lines.append(f"{g.kind} {','.join(map(str, g.targets))} {g.angle:.12g}")
    return "\n".join(lines) + "\n"


def parse_netlist(text: str) -> list[Gate]:
    gates = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        kind, targets, angle = line.split()
        gates.append(Gate(kind, tuple(int(t) for t in targets.split(",")), float(angle)))
    return gates
