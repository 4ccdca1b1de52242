"""Circuit-model constructions for selecting and ordering oracle calls.

Wire layout shared by every generator here: the system register is
wires ``0 .. N-1`` (wire 0 carries the data qubit, the rest start in
``|0>``), and control registers follow it.  For the disposition circuit
stage ``t`` (1-based) owns ``control_t`` = wires
``N + (t-1)*n .. N + t*n - 1`` and bit ``j`` of that register is bit
``j`` of the index programmed for the stage.  Printed most significant
wire first, joint control kets therefore read ``C_N ... C_1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from qswitch import qcore
from qswitch.circuit import Circuit, cswap, invert, oracle_call, simulate
from qswitch.errors import DomainError
from qswitch.qcore import StateVector


def log2_exact(N: int) -> int:
    if N < 2 or N & (N - 1):
        raise DomainError(f"N = {N} is not a power of two >= 2")
    return N.bit_length() - 1


def next_power_of_two(N: int) -> int:
    if N < 1:
        raise DomainError("need at least one unitary")
    return max(2, 1 << (N - 1).bit_length())


def pad_unitaries(unitaries: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Extend the set with identities up to the next power of two."""
    M = next_power_of_two(len(unitaries))
    return [np.asarray(u, dtype=complex) for u in unitaries] + [qcore.I2] * (M - len(unitaries))


@dataclass(frozen=True)
class RoutingStep:
    step_index: int
    control_wire: int
    swap_pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class DispositionProgram:
    """Indices ``i_1 .. i_N``; ``i_1`` selects the first unitary applied."""

    N: int
    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.N < 1:
            raise DomainError("N must be positive")
        if len(self.indices) != self.N:
            raise DomainError(f"program needs exactly {self.N} indices, got {len(self.indices)}")
        bad = [i for i in self.indices if not 0 <= i < self.N]
        if bad:
            raise DomainError(f"indices {bad} out of range [0, {self.N})")

    def to_json(self) -> dict:
        return {"N": self.N, "indices": list(self.indices)}

    @classmethod
    def from_json(cls, data: Mapping) -> "DispositionProgram":
        return cls(int(data["N"]), tuple(data["indices"]))


def routing_steps(n: int, control_offset: int | None = None) -> list[RoutingStep]:
    """Layers of the n-controlled swap.

    Step ``k`` holds ``2**k`` swaps of ``[s]_k 0 [0]`` with ``[s]_k 1 [0]``
    and is driven by bit ``n-1-k`` of the control integer, which lives on
    wire ``control_offset + n-1-k``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    N = 1 << n
    offset = N if control_offset is None else control_offset
    steps = []
    for k in range(n):
        shift = n - k
        pairs = tuple((s << shift, (s << shift) | (1 << (shift - 1))) for s in range(1 << k))
        steps.append(RoutingStep(k, offset + n - 1 - k, pairs))
    return steps


def build_n_controlled_swap(n: int) -> Circuit:
    steps = routing_steps(n)
    N = 1 << n
    gates = [cswap(step.control_wire, a, b) for step in steps for a, b in step.swap_pairs]
    return Circuit(N + n, gates, {"system": (0, N), "control": (N, N + n)})


def routing_permutation(n: int, i: int) -> tuple[int, ...]:
    """Wire permutation ``pi`` of the n-controlled swap with control value ``i``.

    ``pi[src]`` is the wire where the state entering on ``src`` ends up.
    """
    N = 1 << n
    if not 0 <= i < N:
        raise DomainError(f"control value {i} out of range for n = {n}")
    content = list(range(N))
    for step in routing_steps(n):
        if (i >> (n - 1 - step.step_index)) & 1:
            for a, b in step.swap_pairs:
                content[a], content[b] = content[b], content[a]
    pi = [0] * N
    for dst, src in enumerate(content):
        pi[src] = dst
    return tuple(pi)


def build_select_circuit(n: int) -> Circuit:
    S = build_n_controlled_swap(n)
    N = 1 << n
    calls = tuple(oracle_call(j, j) for j in range(N))
    return Circuit(S.num_qubits, S.gates + calls + invert(S).gates, S.registers)


def stage_control_register(N: int, t: int) -> tuple[int, int]:
    """Wire range of the control register for stage ``t`` (1-based)."""
    n = log2_exact(N)
    lo = N + (t - 1) * n
    return lo, lo + n


def build_disposition_circuit(N: int) -> Circuit:
    n = log2_exact(N)
    select = build_select_circuit(n)
    registers = {"system": (0, N)}
    gates = []
    for t in range(1, N + 1):
        lo, hi = stage_control_register(N, t)
        registers[f"control_{t}"] = (lo, hi)
        mapping = {N + j: lo + j for j in range(n)}
        gates.extend(g.remap(mapping) for g in select.gates)
    return Circuit(N + N * n, gates, registers)


def _check_psi(psi: StateVector) -> None:
    if psi.num_qubits != 1:
        raise DomainError(f"psi must be a single-qubit state, got {psi.num_qubits} qubits")


def _system_input(N: int, psi: StateVector) -> StateVector:
    amps = np.zeros(1 << N, dtype=complex)
    amps[:2] = psi.amplitudes
    return StateVector(amps, check=False)


def run_select(unitaries: Sequence[np.ndarray], i: int, psi: StateVector, strict: bool = False) -> StateVector:
    """Output of the select circuit on wire 0 for control value ``i``.

    Sets that are not a power of two are padded with identities; with
    ``strict`` a control value addressing a padded slot is rejected.
    The result is defined up to a global phase (see
    :func:`qswitch.qcore.reduce_to_wire`).
    """
    _check_psi(psi)
    padded = pad_unitaries(unitaries)
    limit = len(unitaries) if strict else len(padded)
    if not 0 <= i < limit:
        raise DomainError(f"select index {i} out of range [0, {limit})")
    N = len(padded)
    n = log2_exact(N)
    qcore.check_size(N + n)
    circuit = build_select_circuit(n)
    state = qcore.tensor(qcore.basis_state(n, i), _system_input(N, psi))
    out = simulate(circuit, state, padded)
    return qcore.reduce_to_wire(out, 0)


def run_disposition(unitaries: Sequence[np.ndarray], program: DispositionProgram, psi: StateVector) -> StateVector:
    """Wire-0 output of the disposition circuit for a classical program.

    Equal, up to global phase, to ``U[i_N] ... U[i_1] psi``.
    """
    _check_psi(psi)
    if program.N != len(unitaries):
        raise DomainError(f"program is for N = {program.N}, got {len(unitaries)} unitaries")
    padded = pad_unitaries(unitaries)
    M = len(padded)
    n = log2_exact(M)
    # Padded stages select an identity slot.
    indices = list(program.indices) + [M - 1] * (M - program.N)
    qcore.check_size(M + M * n)
    control = sum(i << (t * n) for t, i in enumerate(indices))
    state = qcore.tensor(qcore.basis_state(M * n, control), _system_input(M, psi))
    out = simulate(build_disposition_circuit(M), state, padded)
    return qcore.reduce_to_wire(out, 0)


def run_disposition_coherent(unitaries: Sequence[np.ndarray], control_state: StateVector, psi: StateVector) -> StateVector:
    """Full joint output (controls ⊗ system) for a superposed program.

    Nothing is traced out: system wires ``1 .. N-1`` carry
    branch-dependent ancilla residues.  Use :func:`branch_states` to read
    the conditional wire-0 state of each control branch.
    """
    _check_psi(psi)
    N = len(unitaries)
    n = log2_exact(N)
    if control_state.num_qubits != N * n:
        raise DomainError(
            f"control state has {control_state.num_qubits} qubits, expected N*log2(N) = {N * n}"
        )
    if abs(control_state.norm - 1.0) > qcore.STATE_TOL:
        raise DomainError("control state is not normalized")
    qcore.check_size(N + N * n)
    state = qcore.tensor(control_state, _system_input(N, psi))
    return simulate(build_disposition_circuit(N), state, list(unitaries))


def branch_states(joint: StateVector, N: int, tol: float = 1e-12) -> dict[tuple[int, ...], tuple[float, StateVector]]:
    """Condition a disposition-circuit output on each control basis value.

    Returns ``{(i_1, ..., i_N): (probability, wire-0 state)}`` for every
    branch with nonzero weight.
    """
    n = log2_exact(N)
    if joint.num_qubits != N + N * n:
        raise DomainError(f"joint state has {joint.num_qubits} qubits, expected {N + N * n}")
    rows = joint.amplitudes.reshape(1 << (N * n), 1 << N)
    norms = np.linalg.norm(rows, axis=1)
    out = {}
    for c in np.flatnonzero(norms > tol):
        system = StateVector(rows[c] / norms[c], check=False)
        key = tuple((int(c) >> (t * n)) & (N - 1) for t in range(N))
        out[key] = (float(norms[c] ** 2), qcore.reduce_to_wire(system, 0))
    return out
