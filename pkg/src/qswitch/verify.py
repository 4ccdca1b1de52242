"""Brute-force oracles.

Nothing here calls the bit-mask kernels in :mod:`qswitch.qcore`: circuit
matrices are built by explicit tensor expansion and permutation-matrix
enumeration, so agreement with the fast simulator is meaningful.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from qswitch import circuit as circ
from qswitch import permcircuits, switchnet
from qswitch.errors import BindingError, DomainError, ResourceLimitError
from qswitch.qcore import CNOT, CSWAP, ORACLE, SINGLE, TOFFOLI, StateVector, haar_random_unitary

MAX_DENSE_QUBITS = 12
DEFAULT_SEED = 20100813


def _embed_single(matrix: np.ndarray, wire: int, q: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(1 << (q - 1 - wire)), matrix), np.eye(1 << wire))


def _classical_image(kind: str, wires, x: int) -> int:
    bit = lambda w: (x >> w) & 1  # noqa: E731
    if kind == CNOT:
        c, t = wires
        return x ^ (bit(c) << t)
    if kind == TOFFOLI:
        c1, c2, t = wires
        return x ^ ((bit(c1) & bit(c2)) << t)
    c, a, b = wires
    if bit(c) and bit(a) != bit(b):
        return x ^ (1 << a) ^ (1 << b)
    return x


def gate_matrix(gate: circ.Gate, q: int, oracle_bindings: Mapping[int, np.ndarray] | None = None) -> np.ndarray:
    """Full ``2**q`` matrix of one gate."""
    if gate.kind == SINGLE:
        return _embed_single(gate.matrix, gate.wires[0], q)
    if gate.kind == ORACLE:
        try:
            u = np.asarray(oracle_bindings[gate.label], dtype=complex)
        except (KeyError, TypeError, IndexError):
            raise BindingError(f"oracle label {gate.label} is unbound") from None
        return _embed_single(u, gate.wires[0], q)
    dim = 1 << q
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        m[_classical_image(gate.kind, gate.wires, x), x] = 1.0
    return m


def dense_circuit_matrix(circuit: circ.Circuit, oracle_bindings=None) -> np.ndarray:
    """Unitary of the whole circuit; later gates multiply on the left."""
    q = circuit.num_qubits
    if q > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense matrices limited to {MAX_DENSE_QUBITS} qubits")
    if oracle_bindings is not None and not isinstance(oracle_bindings, Mapping):
        oracle_bindings = dict(enumerate(oracle_bindings))
    out = np.eye(1 << q, dtype=complex)
    for g in circuit.gates:
        out = gate_matrix(g, q, oracle_bindings) @ out
    return out


def enumerate_dispositions(N: int) -> list[list[int]]:
    if N < 1:
        raise DomainError("N must be positive")
    if N ** N > 10 ** 6:
        raise ResourceLimitError(f"{N}**{N} dispositions exceed the enumeration limit")
    return [list(p) for p in itertools.product(range(N), repeat=N)]


def enumerate_permutations(N: int) -> list[list[int]]:
    if not 1 <= N <= 8:
        raise ResourceLimitError("permutation enumeration limited to 1 <= N <= 8")
    return [list(p) for p in itertools.permutations(range(N))]


# --------------------------------------------------------------------------
# random inputs


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    v = rng.standard_normal(1 << num_qubits) + 1j * rng.standard_normal(1 << num_qubits)
    return StateVector(v / np.linalg.norm(v))


def random_unitaries(N: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [haar_random_unitary(int(s)) for s in rng.integers(0, 2 ** 63, size=N)]


def random_circuit(num_qubits: int, num_gates: int, rng: np.random.Generator, oracle_labels: int = 0) -> circ.Circuit:
    """Mix of every gate kind the wire count allows."""
    kinds = [SINGLE]
    if num_qubits >= 2:
        kinds.append(CNOT)
    if num_qubits >= 3:
        kinds += [TOFFOLI, CSWAP]
    if oracle_labels:
        kinds.append(ORACLE)
    gates = []
    for _ in range(num_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == SINGLE:
            gates.append(circ.single_qubit(haar_random_unitary(int(rng.integers(2 ** 32))), int(rng.integers(num_qubits))))
        elif kind == ORACLE:
            gates.append(circ.oracle_call(int(rng.integers(oracle_labels)), int(rng.integers(num_qubits))))
        else:
            arity = 2 if kind == CNOT else 3
            wires = [int(w) for w in rng.choice(num_qubits, size=arity, replace=False)]
            gates.append(circ.Gate(kind, tuple(wires)))
    return circ.Circuit(num_qubits, gates)


# --------------------------------------------------------------------------
# cross-model comparison


@dataclass
class EquivalenceReport:
    cases_run: int = 0
    max_error: float = 0.0
    tolerance: float = 1e-9
    failures: list[dict] = field(default_factory=list)
    uses: dict[str, dict[int, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "cases_run": self.cases_run,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "failures": self.failures,
            "uses": {model: {str(k): v for k, v in u.items()} for model, u in self.uses.items()},
        }


def _aligned_error(expected: np.ndarray, actual: np.ndarray) -> float:
    overlap = np.vdot(actual, expected)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(expected - phase * actual)))


def cross_model_check(N: int, trials: int, seed=DEFAULT_SEED, tol: float = 1e-9, identity: bool = False) -> EquivalenceReport:
    """Program the same random permutation in both models and compare wire-0 outputs.

    The circuit model runs the disposition circuit with the permutation as
    its program; the switch model evaluates the network under an
    assignment realizing that permutation and multiplies the slot
    unitaries.  Both are also checked against the plain matrix product.
    Errors are measured after global-phase alignment, since the circuit
    model only fixes the data qubit up to a phase.
    """
    if N not in (2, 4):
        raise DomainError("cross-model checks run the circuit model at N in {2, 4}")
    rng = np.random.default_rng(seed)
    net = switchnet.build_network(N)
    report = EquivalenceReport(tolerance=tol)
    report.uses = {
        "circuit": circ.count_resources(permcircuits.build_disposition_circuit(N)).oracle_uses,
        "switch": switchnet.uses_per_channel(net),
    }
    for trial in range(trials):
        us = [np.eye(2, dtype=complex)] * N if identity else random_unitaries(N, rng)
        sigma = [int(x) for x in rng.permutation(N)]
        psi = random_state(1, rng)
        direct = np.eye(2, dtype=complex)
        for j in sigma:
            direct = us[j] @ direct
        direct = direct @ psi.amplitudes

        circuit_out = permcircuits.run_disposition(us, permcircuits.DispositionProgram(N, sigma), psi).amplitudes
        assignment = switchnet.assignment_for(net, sigma)
        perm = switchnet.evaluate(net, assignment)
        switch_out = perm.unitary(us) @ psi.amplitudes

        err = max(
            _aligned_error(switch_out, circuit_out),
            _aligned_error(direct, circuit_out),
            float(np.max(np.abs(direct - switch_out))),
        )
        report.cases_run += 1
        report.max_error = max(report.max_error, err)
        if err > tol or list(perm.sigma) != sigma:
            report.failures.append({"trial": trial, "sigma": sigma, "error": err})
    return report


def realized_dispositions(N: int, seed=DEFAULT_SEED) -> set[tuple[int, ...]]:
    """Order lists produced by the disposition circuit over every control value.

    Each output is identified by matching it against all ``N**N`` oracle
    products for a generic unitary set.
    """
    rng = np.random.default_rng(seed)
    us = random_unitaries(N, rng)
    psi = random_state(1, rng)
    candidates = enumerate_dispositions(N)
    images = []
    for order in candidates:
        m = np.eye(2, dtype=complex)
        for j in order:
            m = us[j] @ m
        images.append(m @ psi.amplitudes)
    n = permcircuits.log2_exact(N)
    found = set()
    for control in range(1 << (N * n)):
        program = tuple((control >> (t * n)) & (N - 1) for t in range(N))
        out = permcircuits.run_disposition(us, permcircuits.DispositionProgram(N, program), psi).amplitudes
        errors = [_aligned_error(img, out) for img in images]
        best = int(np.argmin(errors))
        if errors[best] <= 1e-9:
            found.add(tuple(candidates[best]))
    return found
