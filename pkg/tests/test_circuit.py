import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch import circuit as circ
from qswitch import permcircuits, qcore, verify
from qswitch.circuit import Circuit, cnot, cswap, oracle_call, single_qubit, toffoli
from qswitch.errors import BindingError, DomainError, InversionError, StructuralError
from qswitch.qcore import H, X, Z


def test_simulate_empty_circuit(rng):
    s = verify.random_state(3, rng)
    assert qcore.compare_states(circ.simulate(Circuit(3), s), s, 0)


def test_simulate_cnot():
    out = circ.simulate(Circuit(2, [cnot(0, 1)]), qcore.basis_state(2, 0b01))
    assert qcore.compare_states(out, qcore.basis_state(2, 0b11))


def test_simulate_binds_oracles():
    c = Circuit(2, [oracle_call(0, 0), oracle_call(1, 1)])
    out = circ.simulate(c, qcore.basis_state(2, 0), {0: X, 1: X})
    assert qcore.compare_states(out, qcore.basis_state(2, 3))
    out = circ.simulate(c, qcore.basis_state(2, 0), [X, np.eye(2)])
    assert qcore.compare_states(out, qcore.basis_state(2, 1))


def test_unbound_oracle():
    c = Circuit(1, [oracle_call(3, 0)])
    with pytest.raises(BindingError):
        circ.simulate(c, qcore.basis_state(1, 0), {0: X})


def test_simulate_size_mismatch():
    with pytest.raises(DomainError):
        circ.simulate(Circuit(2), qcore.basis_state(3, 0))


def test_gate_outside_circuit():
    with pytest.raises(StructuralError):
        Circuit(2, [cswap(0, 1, 2)])


def test_registers_validated():
    Circuit(3, [], {"system": (0, 2), "control": (2, 3)})
    with pytest.raises(StructuralError):
        Circuit(3, [], {"system": (0, 2), "control": (1, 3)})
    with pytest.raises(StructuralError):
        Circuit(3, [], {"system": (0, 2)})


def test_select_circuit_routes_to_wire_two():
    # n = 2, control value |10> = 2: psi on wire 0 must surface on wire 2.
    c = permcircuits.build_n_controlled_swap(2)
    psi = qcore.StateVector(np.array([0.6, 0.8]))
    system_in = np.zeros(16, dtype=complex)
    system_in[:2] = psi.amplitudes
    state = qcore.tensor(qcore.basis_state(2, 2), qcore.StateVector(system_in))
    out = circ.simulate(c, state)
    expected_system = np.zeros(16, dtype=complex)
    expected_system[0] = 0.6
    expected_system[1 << 2] = 0.8
    expected = qcore.tensor(qcore.basis_state(2, 2), qcore.StateVector(expected_system))
    assert qcore.compare_states(out, expected, 1e-12)


def test_invert_examples():
    assert circ.invert(Circuit(2, [cnot(0, 1)])).gates == (cnot(0, 1),)
    a = single_qubit(qcore.haar_random_unitary(1), 0)
    b = toffoli(0, 1, 2)
    inv = circ.invert(Circuit(3, [a, b]))
    assert inv.gates[0] == b
    np.testing.assert_allclose(inv.gates[1].matrix, a.matrix.conj().T)


def test_invert_rejects_oracles():
    with pytest.raises(InversionError):
        circ.invert(Circuit(1, [oracle_call(0, 0)]))


def test_invert_roundtrip(rng):
    c = verify.random_circuit(4, 10, rng)
    s = verify.random_state(4, rng)
    back = circ.simulate(circ.invert(c), circ.simulate(c, s))
    assert qcore.compare_states(back, s, 1e-9)


def test_lower_single_cswap():
    low = circ.lower_controlled_swaps(Circuit(3, [cswap(2, 0, 1)]))
    assert low.gates == (cnot(1, 0), toffoli(2, 0, 1), cnot(1, 0))
    r = circ.count_resources(low)
    assert (r.cnot_count, r.toffoli_count, r.controlled_swap_count) == (2, 1, 0)


@pytest.mark.parametrize("index", range(8))
def test_lowered_cswap_on_basis(index):
    c = Circuit(3, [cswap(2, 0, 1)])
    s = qcore.basis_state(3, index)
    assert qcore.compare_states(
        circ.simulate(circ.lower_controlled_swaps(c), s), circ.simulate(c, s), 0
    )


def test_lower_without_cswaps_is_noop():
    c = Circuit(2, [cnot(0, 1), single_qubit(H, 1)])
    assert circ.lower_controlled_swaps(c) == c


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 10), st.integers(1, 30))
def test_lowering_preserves_semantics(seed, q, num_gates):
    rng = np.random.default_rng(seed)
    c = verify.random_circuit(q, num_gates, rng, oracle_labels=2)
    s = verify.random_state(q, rng)
    us = verify.random_unitaries(2, rng)
    a = circ.simulate(c, s, us)
    b = circ.simulate(circ.lower_controlled_swaps(c), s, us)
    assert qcore.compare_states(a, b, 1e-12)


def test_count_resources_toffoli_cost():
    c = Circuit(3, [toffoli(0, 1, 2), cnot(0, 1), single_qubit(Z, 2), oracle_call(5, 0), oracle_call(5, 1)])
    raw = circ.count_resources(c)
    assert (raw.cnot_count, raw.single_qubit_count, raw.toffoli_count) == (1, 1, 1)
    assert raw.oracle_uses == {5: 2}
    low = circ.count_resources(c, lower_toffoli=True)
    assert (low.cnot_count, low.single_qubit_count, low.toffoli_count) == (7, 10, 0)


@pytest.mark.parametrize("N", [2, 4, 8, 16])
def test_select_counts(N):
    n = N.bit_length() - 1
    c = permcircuits.build_select_circuit(n)
    low = circ.count_resources(circ.lower_controlled_swaps(c), lower_toffoli=True)
    assert low.cnot_count == 16 * (N - 1)
    assert low.single_qubit_count == 18 * (N - 1)
    assert low.oracle_uses == {j: 1 for j in range(N)}


def test_ncswap_count_n8():
    assert circ.count_resources(permcircuits.build_n_controlled_swap(3)).controlled_swap_count == 7


@pytest.mark.parametrize("N", [2, 4, 8])
def test_disposition_counts(N):
    n = N.bit_length() - 1
    c = permcircuits.build_disposition_circuit(N)
    low = circ.count_resources(circ.lower_controlled_swaps(c), lower_toffoli=True)
    assert low.cnot_count == 16 * N * (N - 1)
    assert low.single_qubit_count == 18 * N * (N - 1)
    assert low.control_qubits == N * n
    assert low.ancilla_qubits == N - 1


def test_circuit_json_roundtrip():
    c = Circuit(
        3,
        [single_qubit(qcore.haar_random_unitary(0), 1), cswap(2, 0, 1), oracle_call(4, 0)],
        {"system": (0, 2), "control": (2, 3)},
    )
    data = json.loads(json.dumps(c.to_json()))
    assert data["gates"][1] == {"kind": "ControlledSwap", "wires": [2, 0, 1]}
    assert data["gates"][2] == {"kind": "OracleCall", "wires": [0], "label": 4}
    assert data["registers"] == {"system": [0, 2], "control": [2, 3]}
    assert Circuit.from_json(data) == c


def test_gate_validation():
    with pytest.raises(StructuralError):
        circ.Gate("SingleQubit", (0,))
    with pytest.raises(DomainError):
        single_qubit([[1, 1], [0, 1]], 0)
    with pytest.raises(StructuralError):
        circ.Gate("Swap", (0, 1))
