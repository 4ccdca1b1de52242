"""Gate-list circuits: simulation, inversion, controlled-swap lowering and resource counts."""

from __future__ import annotations

import dataclasses
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from qswitch import qcore
from qswitch.errors import BindingError, DomainError, InversionError, StructuralError
from qswitch.qcore import CNOT, CSWAP, ORACLE, SINGLE, TOFFOLI, StateVector

# Cost of one Toffoli in the optimal CNOT + single-qubit decomposition.
TOFFOLI_CNOTS = 6
TOFFOLI_SINGLES = 9

KINDS = (SINGLE, CNOT, TOFFOLI, CSWAP, ORACLE)


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[int, ...]
    # Row-major 2x2 entries as a nested tuple so gates stay hashable.
    unitary: tuple | None = None
    label: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        qcore.check_wires(self.kind, self.wires)
        if self.kind == SINGLE:
            if self.unitary is None:
                raise StructuralError("SingleQubit gate needs a unitary")
            m = qcore.as_unitary2(self.unitary)
            object.__setattr__(self, "unitary", tuple(tuple(complex(z) for z in row) for row in m))
        elif self.unitary is not None:
            raise StructuralError(f"{self.kind} does not take a unitary")
        if self.kind == ORACLE:
            if self.label is None:
                raise StructuralError("OracleCall needs a label")
            object.__setattr__(self, "label", int(self.label))
        elif self.label is not None:
            raise StructuralError(f"{self.kind} does not take a label")

    @property
    def matrix(self) -> np.ndarray | None:
        return None if self.unitary is None else np.array(self.unitary, dtype=complex)

    def inverse(self) -> "Gate":
        if self.kind == ORACLE:
            raise InversionError(f"oracle {self.label} has no available adjoint")
        if self.kind == SINGLE:
            return single_qubit(self.matrix.conj().T, self.wires[0])
        return self

    def remap(self, mapping: Mapping[int, int]) -> "Gate":
        return dataclasses.replace(self, wires=tuple(mapping.get(w, w) for w in self.wires))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "wires": list(self.wires)}
        if self.unitary is not None:
            out["unitary"] = qcore.unitary_to_json(self.matrix)
        if self.label is not None:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Gate":
        unitary = data.get("unitary")
        if unitary is not None:
            unitary = qcore.unitary_from_json(unitary)
        return cls(data["kind"], tuple(data["wires"]), unitary, data.get("label"))


def single_qubit(matrix, wire: int) -> Gate:
    return Gate(SINGLE, (wire,), unitary=matrix)


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def toffoli(control1: int, control2: int, target: int) -> Gate:
    return Gate(TOFFOLI, (control1, control2, target))


def cswap(control: int, wire_a: int, wire_b: int) -> Gate:
    return Gate(CSWAP, (control, wire_a, wire_b))


def oracle_call(label: int, wire: int) -> Gate:
    return Gate(ORACLE, (wire,), label=label)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over ``num_qubits`` wires.

    ``registers`` maps a name to a half-open wire range ``(lo, hi)``.
    Registers whose name starts with ``"control"`` count as control
    qubits; the ``"system"`` register holds one data wire plus ancillas.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    registers: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise DomainError("a circuit needs at least one wire")
        object.__setattr__(self, "gates", tuple(self.gates))
        regs = {name: (int(lo), int(hi)) for name, (lo, hi) in self.registers.items()}
        object.__setattr__(self, "registers", regs)
        for g in self.gates:
            for w in g.wires:
                if w >= self.num_qubits:
                    raise StructuralError(
                        f"{g.kind}{g.wires} touches wire {w} of a {self.num_qubits}-wire circuit"
                    )
        if regs:
            covered = []
            for name, (lo, hi) in regs.items():
                if not 0 <= lo < hi <= self.num_qubits:
                    raise StructuralError(f"register {name!r} range [{lo}, {hi}) is invalid")
                covered.extend(range(lo, hi))
            if len(covered) != len(set(covered)):
                raise StructuralError("registers overlap")
            if len(covered) != self.num_qubits:
                raise StructuralError("registers do not cover every wire")

    def __len__(self):
        return len(self.gates)

    def register_wires(self, name: str) -> range:
        lo, hi = self.registers[name]
        return range(lo, hi)

    def oracle_labels(self) -> set[int]:
        return {g.label for g in self.gates if g.kind == ORACLE}

    def to_json(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "registers": {name: [lo, hi] for name, (lo, hi) in self.registers.items()},
            "gates": [g.to_json() for g in self.gates],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Circuit":
        return cls(
            int(data["num_qubits"]),
            tuple(Gate.from_json(g) for g in data.get("gates", [])),
            {name: tuple(r) for name, r in data.get("registers", {}).items()},
        )


@dataclass
class ResourceReport:
    cnot_count: int = 0
    single_qubit_count: int = 0
    toffoli_count: int = 0
    controlled_swap_count: int = 0
    control_qubits: int = 0
    ancilla_qubits: int = 0
    oracle_uses: dict[int, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = dataclasses.asdict(self)
        out["oracle_uses"] = {str(k): v for k, v in sorted(self.oracle_uses.items())}
        return out


def _bind(oracle_bindings) -> Mapping[int, np.ndarray]:
    if oracle_bindings is None:
        return {}
    if isinstance(oracle_bindings, Mapping):
        return oracle_bindings
    return dict(enumerate(oracle_bindings))


def simulate(circuit: Circuit, input: StateVector, oracle_bindings=None) -> StateVector:
    """Run ``circuit`` on ``input``.

    ``oracle_bindings`` maps oracle labels to 2x2 unitaries; a plain
    sequence binds label ``j`` to its ``j``-th element.
    """
    if input.num_qubits != circuit.num_qubits:
        raise DomainError(
            f"input has {input.num_qubits} qubits, circuit has {circuit.num_qubits}"
        )
    bindings = _bind(oracle_bindings)
    missing = circuit.oracle_labels() - set(bindings)
    if missing:
        raise BindingError(f"unbound oracle labels: {sorted(missing)}")
    matrices = {label: qcore.as_unitary2(bindings[label]) for label in circuit.oracle_labels()}

    amps = input.amplitudes.copy()
    for g in circuit.gates:
        if g.kind == ORACLE:
            qcore.apply_inplace(amps, SINGLE, g.wires, matrices[g.label])
        else:
            qcore.apply_inplace(amps, g.kind, g.wires, g.matrix)
    return StateVector(amps, check=False)


def invert(circuit: Circuit) -> Circuit:
    return dataclasses.replace(circuit, gates=tuple(g.inverse() for g in reversed(circuit.gates)))


def lower_controlled_swaps(circuit: Circuit) -> Circuit:
    """Replace every ControlledSwap(c, a, b) by CNOT(b, a) Toffoli(c, a, b) CNOT(b, a)."""
    gates = []
    for g in circuit.gates:
        if g.kind == CSWAP:
            c, a, b = g.wires
            gates += [cnot(b, a), toffoli(c, a, b), cnot(b, a)]
        else:
            gates.append(g)
    return dataclasses.replace(circuit, gates=tuple(gates))


def count_resources(circuit: Circuit, lower_toffoli: bool = False) -> ResourceReport:
    """Tally gates by kind.

    With ``lower_toffoli`` each Toffoli is charged as 6 CNOTs and 9
    single-qubit gates instead of being counted as a Toffoli.  Oracle
    calls are reported per label and never counted as single-qubit gates.
    """
    kinds = Counter(g.kind for g in circuit.gates)
    report = ResourceReport(
        cnot_count=kinds[CNOT],
        single_qubit_count=kinds[SINGLE],
        toffoli_count=kinds[TOFFOLI],
        controlled_swap_count=kinds[CSWAP],
        oracle_uses=dict(sorted(Counter(g.label for g in circuit.gates if g.kind == ORACLE).items())),
    )
    if lower_toffoli:
        report.cnot_count += TOFFOLI_CNOTS * report.toffoli_count
        report.single_qubit_count += TOFFOLI_SINGLES * report.toffoli_count
        report.toffoli_count = 0
    for name, (lo, hi) in circuit.registers.items():
        if name.startswith("control"):
            report.control_qubits += hi - lo
        elif name == "system":
            report.ancilla_qubits += hi - lo - 1
    return report


def concatenate(circuits: Sequence[Circuit], registers: Mapping[str, tuple[int, int]] | None = None) -> Circuit:
    """Gates of all ``circuits`` in order, on the widest wire count."""
    q = max(c.num_qubits for c in circuits)
    gates = tuple(g for c in circuits for g in c.gates)
    return Circuit(q, gates, dict(registers or {}))
