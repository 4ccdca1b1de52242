import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch import qcore, verify
from qswitch.circuit import Gate, cnot, cswap, single_qubit, toffoli
from qswitch.errors import DomainError, StructuralError
from qswitch.qcore import H, I2, X, Y, Z, StateVector


def test_basis_state():
    np.testing.assert_array_equal(qcore.basis_state(1, 0).amplitudes, [1, 0])
    np.testing.assert_array_equal(qcore.basis_state(2, 3).amplitudes, [0, 0, 0, 1])
    s = qcore.basis_state(3, 5)
    assert s.amplitudes[5] == 1 and np.count_nonzero(s.amplitudes) == 1
    # wire0=1, wire1=0, wire2=1, printed high wire first
    assert list(s.nonzero()) == ["101"]


@pytest.mark.parametrize("q, index", [(1, 2), (2, -1), (3, 8)])
def test_basis_state_out_of_range(q, index):
    with pytest.raises(DomainError):
        qcore.basis_state(q, index)


def test_state_vector_rejects_bad_input():
    with pytest.raises(DomainError):
        StateVector([1, 0, 0])
    with pytest.raises(DomainError):
        StateVector([1, 1])
    with pytest.raises(DomainError):
        StateVector([np.nan, 0])


def test_apply_x():
    out = qcore.apply_gate(qcore.basis_state(2, 0), single_qubit(X, 0))
    assert qcore.compare_states(out, qcore.basis_state(2, 1))


def test_apply_fredkin():
    # control wire 2 set, wire1=1, wire0=0  ->  wire1=0, wire0=1
    out = qcore.apply_gate(qcore.basis_state(3, 0b110), cswap(2, 0, 1))
    assert qcore.compare_states(out, qcore.basis_state(3, 0b101))
    # control clear: nothing moves
    out = qcore.apply_gate(qcore.basis_state(3, 0b010), cswap(2, 0, 1))
    assert qcore.compare_states(out, qcore.basis_state(3, 0b010))


def test_apply_hadamard():
    out = qcore.apply_gate(qcore.basis_state(1, 0), single_qubit(H, 0))
    assert qcore.compare_states(out, StateVector(np.array([1, 1]) / np.sqrt(2)))


def test_apply_gate_leaves_input_untouched():
    s = qcore.basis_state(2, 0)
    qcore.apply_gate(s, single_qubit(X, 1))
    assert s.amplitudes[0] == 1


def test_wire_collision():
    with pytest.raises(StructuralError):
        cswap(0, 1, 1)
    with pytest.raises(StructuralError):
        Gate("CNOT", (2, 2))


def test_wire_out_of_range():
    with pytest.raises(DomainError):
        qcore.apply_gate(qcore.basis_state(2, 0), cnot(0, 2))


@pytest.mark.parametrize("index", range(8))
def test_toffoli_truth_table(index):
    out = qcore.apply_gate(qcore.basis_state(3, index), toffoli(0, 1, 2))
    expected = index ^ (4 if index & 3 == 3 else 0)
    assert qcore.compare_states(out, qcore.basis_state(3, expected))


def test_compare_states_and_fidelity():
    zero, one = qcore.basis_state(1, 0), qcore.basis_state(1, 1)
    assert qcore.compare_states(zero, zero, 1e-9)
    assert not qcore.compare_states(zero, one, 1e-9)
    v = StateVector(np.array([0.6, 0.8j]))
    flipped = StateVector(v.amplitudes * np.exp(1j * np.pi))
    assert not qcore.compare_states(v, flipped, 1e-9)
    assert qcore.fidelity(v, flipped) == pytest.approx(1.0, abs=1e-9)
    assert qcore.phase_aligned_error(v, flipped) < 1e-15
    with pytest.raises(DomainError):
        qcore.compare_states(zero, qcore.basis_state(2, 0), 1e-9)


def test_haar_deterministic_and_unitary():
    a, b = qcore.haar_random_unitary(11), qcore.haar_random_unitary(11)
    np.testing.assert_array_equal(a, b)
    for seed in range(200):
        u = qcore.haar_random_unitary(seed)
        assert np.max(np.abs(u.conj().T @ u - I2)) < 1e-10


def test_haar_second_moment():
    # Haar measure on U(2): E|tr U|^2 = 1, so E|tr U|^2 / 4 = 1/4.
    values = [abs(np.trace(qcore.haar_random_unitary(s))) ** 2 / 4 for s in range(10_000)]
    assert np.mean(values) == pytest.approx(0.25, abs=0.02)


def test_haar_is_not_biased_to_real_diagonal():
    # Without the phase fix, QR output has a real non-negative R diagonal and
    # Q columns biased accordingly; the fixed sampler has E[U_00] = 0.
    mean = np.mean([qcore.haar_random_unitary(s)[0, 0] for s in range(10_000)])
    assert abs(mean) < 0.03


def test_product_in_order():
    np.testing.assert_allclose(qcore.product_in_order([I2, X], [1]), X)
    np.testing.assert_allclose(qcore.product_in_order([X, Z], [0, 1]), [[0, 1], [-1, 0]])
    np.testing.assert_allclose(qcore.product_in_order([X, Z], [0, 1]), 1j * Y)
    np.testing.assert_allclose(qcore.product_in_order([X, Z], []), I2)
    with pytest.raises(DomainError):
        qcore.product_in_order([X], [1])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.integers(0, 3), max_size=6), st.lists(st.integers(0, 3), max_size=6))
def test_product_in_order_composes(seed, o1, o2):
    us = verify.random_unitaries(4, np.random.default_rng(seed))
    lhs = qcore.product_in_order(us, o1 + o2)
    rhs = qcore.product_in_order(us, o2) @ qcore.product_in_order(us, o1)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.integers(0, 40))
def test_norm_preserved(seed, q, num_gates):
    rng = np.random.default_rng(seed)
    state = verify.random_state(q, rng)
    for g in verify.random_circuit(q, num_gates, rng).gates:
        state = qcore.apply_gate(state, g)
        assert abs(state.norm - 1) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_disjoint_gates_commute(seed):
    rng = np.random.default_rng(seed)
    q = 7
    wires = [int(w) for w in rng.permutation(q)]
    g1 = cswap(*wires[:3])
    g2 = Gate("Toffoli", tuple(wires[3:6])) if rng.integers(2) else single_qubit(qcore.haar_random_unitary(seed), wires[3])
    s = verify.random_state(q, rng)
    ab = qcore.apply_gate(qcore.apply_gate(s, g1), g2)
    ba = qcore.apply_gate(qcore.apply_gate(s, g2), g1)
    assert qcore.compare_states(ab, ba, 1e-12)


def test_unitary_json_roundtrip():
    u = qcore.haar_random_unitary(3)
    text = json.dumps(qcore.unitary_to_json(u))
    data = json.loads(text)
    assert len(data) == 2 and len(data[0]) == 2 and len(data[0][0]) == 2
    np.testing.assert_array_equal(qcore.unitary_from_json(data), u)
    with pytest.raises(DomainError):
        qcore.unitary_from_json([[[2, 0], [0, 0]], [[0, 0], [1, 0]]])


def test_reduce_to_wire():
    v = StateVector(np.array([0.6, 0.8j]))
    anc = StateVector(np.array([1, 1j, 0, 0]) / np.sqrt(2))
    joint = qcore.tensor(anc, v)
    assert qcore.phase_aligned_error(v, qcore.reduce_to_wire(joint, 0)) < 1e-12
    bell = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    with pytest.raises(DomainError):
        qcore.reduce_to_wire(bell, 0)


def test_bits_roundtrip():
    assert qcore.bits_of(6, 3) == (1, 1, 0)
    assert qcore.value_of((1, 1, 0)) == 6
    with pytest.raises(DomainError):
        qcore.bits_of(8, 3)
