import numpy as np
import pytest
from scipy.linalg import expm

from z2lpg.lattice import (
    LatticeSpec,
    ModelParams,
    build_circuit_error,
    build_field_term,
    build_hamiltonian,
    build_hilbert_space,
    build_hopping,
    build_initial_state,
    build_protection,
    TAU_Z,
)
from z2lpg.sequences import make_sequence
from z2lpg.trotter import (
    CircuitConfig,
    Gate,
    apply_gate,
    compile_step,
    ideal_protection_strength,
    parse_netlist,
    register_permutation,
    run_circuit,
    step_matrix,
    to_netlist,
    to_register,
)

SEQ = make_sequence("elevenths")
A_DAG = np.array([[0, 0], [1, 0]])  # |1><0| in the occupation basis
X = np.array([[0, 1], [1, 0]])


@pytest.fixture(scope="module")
def open4():
    return build_hilbert_space(LatticeSpec(4, "open"))


def _in_library_basis(space, U):
    perm = register_permutation(space)
    return U[np.ix_(perm, perm)]


def _bond_hop(space, j, link_op):
    t = build_hopping(space, (j, j + 1), link_op)
    return (t + t.T).toarray()


def test_gate_counts_six_sites(open6_half):
    step = compile_step(open6_half, ModelParams(lam=0.1, V=2.0, error_model="circuit"), SEQ, 0.2)
    assert step.counts() == {"HoppingBlock": 5, "Rx": 6 + 1, "GaugePhaseFlip": 6, "TwoQubitMatterHop": 5, "Rz": 6, "XX": 5}
    assert len(step.layer("protection")) == 6 + 5 + 1
    assert step.n_qubits == 12


def test_only_hopping_without_field_error_or_protection(open6_half):
    step = compile_step(open6_half, ModelParams(h=0.0, lam=0.0, V=0.0, error_model="circuit"), SEQ, 0.2)
    assert step.counts() == {"HoppingBlock": 5}


def test_layers_match_exponentials(open4):
    J, h, lam, V, dt = 1.0, 0.3, 0.25, 3.0, 0.17
    step = compile_step(open4, ModelParams(J=J, h=h, lam=lam, V=V, error_model="circuit"), SEQ, dt)
    n = step.n_qubits
    even = sum(_bond_hop(open4, j, TAU_Z) for j in (1, 3))
    odd = _bond_hop(open4, 2, TAU_Z)
    expected = {
        "H_J": expm(1j * J * dt * odd) @ expm(1j * J * dt * even),
        "H_h": expm(1j * h * dt * build_field_term(open4).toarray()),
        "error": expm(-1j * lam * dt * _bond_hop(open4, 2, np.eye(2)))
        @ expm(-1j * lam * dt * sum(_bond_hop(open4, j, np.eye(2)) for j in (1, 3)))
        @ expm(-1j * lam * dt * (build_circuit_error(open4).toarray() - sum(_bond_hop(open4, j, np.eye(2)) for j in (1, 2, 3)))),
        "protection": expm(-1j * dt * build_protection(open4, SEQ, V).toarray()),
    }
    for name, ref in expected.items():
        got = _in_library_basis(open4, step_matrix(step.layer(name), n))
        assert np.abs(got - ref).max() < 1e-10, name


def test_hopping_block_closed_form():
    K = np.kron(np.kron(A_DAG, X), A_DAG.T)
    K = K + K.T
    for theta in (0.2, 1.3, -2.7):
        assert np.abs(Gate("HoppingBlock", (0, 1, 2), theta).matrix - expm(1j * theta * K)).max() < 1e-12
    K2 = np.kron(A_DAG, A_DAG.T)
    K2 = K2 + K2.T
    assert np.abs(Gate("TwoQubitMatterHop", (0, 1), 0.4).matrix - expm(-0.4j * K2)).max() < 1e-12


def test_elementary_gates():
    assert np.allclose(Gate("Rx", (0,), 2 * np.pi).matrix, -np.eye(2))
    theta = 0.37
    assert Gate("XX", (0, 1), theta).matrix[0, 0] == pytest.approx(np.exp(-1j * theta))
    assert np.allclose(np.abs(Gate("XX", (0, 1), theta).matrix), np.eye(4))
    Z = np.diag([1.0, -1.0])
    assert np.allclose(Gate("GaugePhaseFlip", (0,), 0.8).matrix, expm(-0.4j * X))
    assert np.allclose(Gate("Rz", (0,), 0.8).matrix, expm(0.4j * Z))
    with pytest.raises(ValueError):
        Gate("CNOT", (0, 1), 0.0)
    with pytest.raises(ValueError):
        Gate("XX", (0,), 0.1)


def test_apply_gate_bounds():
    reg = np.zeros((2, 2, 2), dtype=complex)
    reg[0, 0, 0] = 1
    with pytest.raises(IndexError):
        apply_gate(reg, Gate("Rx", (3,), 0.1))


def test_step_is_first_order(open4):
    params = ModelParams(lam=0.3, V=2.0, error_model="circuit")
    H = build_hamiltonian(open4, params, SEQ).toarray()
    resid = []
    for dt in (1e-3, 5e-4):
        U = _in_library_basis(open4, step_matrix(compile_step(open4, params, SEQ, dt).gates, 8))
        resid.append(np.abs(U - (np.eye(open4.dim) - 1j * dt * H)).max())
    assert resid[0] < 1e-4
    assert resid[0] / resid[1] == pytest.approx(4.0, rel=0.05)


def test_unitarity_over_hundred_steps(open6_half):
    psi = build_initial_state(open6_half, "staggered")
    ts = run_circuit(open6_half, CircuitConfig(0.2, 100, ModelParams(lam=0.1, V=4.0, error_model="circuit"), SEQ), psi)
    assert np.abs(ts.norm - 1).max() < 1e-9
    assert len(ts) == 101 and ts.t[-1] == pytest.approx(20.0)


@pytest.mark.parametrize("V", [0.0, 1.0, 4.0])
@pytest.mark.parametrize("state", ["staggered", "domain_wall"])
def test_gauge_preserved_without_error(open6_half, V, state):
    psi = build_initial_state(open6_half, state)
    ts = run_circuit(open6_half, CircuitConfig(0.2, 100, ModelParams(lam=0.0, V=V, error_model="circuit"), SEQ), psi)
    assert np.abs(6 - ts.sumG).max() < 1e-6


def test_unprotected_violation_grows(open6_half):
    psi = build_initial_state(open6_half, "staggered")
    ts = run_circuit(open6_half, CircuitConfig(0.2, 100, ModelParams(lam=0.1, error_model="circuit"), SEQ), psi)
    quarters = [ts.eps_raw[i : i + 25].mean() for i in range(1, 101, 25)]
    assert all(b > a for a, b in zip(quarters, quarters[1:]))


def test_sample_every(open6_half):
    psi = build_initial_state(open6_half, "staggered")
    cfg = CircuitConfig(0.2, 10, ModelParams(lam=0.1, V=1.0, error_model="circuit"), SEQ, sample_every=5)
    assert np.allclose(run_circuit(open6_half, cfg, psi).t, [0, 1, 2])


def test_register_round_trip(open6_half):
    psi = build_initial_state(open6_half, "domain_wall")
    reg = to_register(open6_half, psi)
    assert reg.shape == (2,) * 12
    # domain wall: matter 111000 and links (-1,+1,-1,-1,-1,-1) interleaved
    bits = [1, 1, 1, 0, 1, 1, 0, 1, 0, 1, 0, 1]
    assert reg[tuple(bits)] == 1


def test_ideal_protection_strength():
    assert ideal_protection_strength(0.2) == pytest.approx(7.854, abs=1e-3)
    assert ideal_protection_strength(0.1) == pytest.approx(15.708, abs=1e-3)
    assert ideal_protection_strength(0.05) == pytest.approx(31.416, abs=1e-3)
    with pytest.raises(ValueError):
        ideal_protection_strength(0.0)


def test_netlist_round_trip(open6_half):
    step = compile_step(open6_half, ModelParams(lam=0.1, V=2.0, error_model="circuit"), SEQ, 0.2)
    text = to_netlist(step)
    assert text.startswith("# qubits 12\n# layer H_J\n")
    gates = parse_netlist(text)
    assert [g.kind for g in gates] == [g.kind for g in step.gates]
    assert all(abs(a.angle - b.angle) < 1e-11 and a.targets == b.targets for a, b in zip(gates, step.gates))
    reg = to_register(open6_half, build_initial_state(open6_half, "staggered"))
    x, y = reg, reg
    for a, b in zip(gates, step.gates):
        x, y = apply_gate(x, a), apply_gate(y, b)
    assert np.abs(x - y).max() < 1e-10


def test_periodic_rejected(pbc4):
    with pytest.raises(ValueError):
        compile_step(pbc4, ModelParams(error_model="circuit"), SEQ, 0.1)
