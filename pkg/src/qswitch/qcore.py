"""State vectors, 2x2 unitaries and the bit-mask gate kernels.

Wire convention: bit ``j`` of a basis index (least significant = bit 0) is
the state of wire ``j``.  Kets are printed with the most significant wire
leftmost, so ``|01>`` on two wires means wire 1 = 0 and wire 0 = 1.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np

from qswitch.errors import DomainError, ResourceLimitError, StructuralError

UNITARY_TOL = 1e-10
STATE_TOL = 1e-9
# 2**24 complex128 amplitudes = 256 MiB per state.
MAX_QUBITS = 24

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Gate kinds understood by the kernels.
SINGLE = "SingleQubit"
CNOT = "CNOT"
TOFFOLI = "Toffoli"
CSWAP = "ControlledSwap"
ORACLE = "OracleCall"


class StateVector:
    """Pure state of ``num_qubits`` wires stored as ``2**num_qubits`` amplitudes."""

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, *, check: bool = True):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        size = amps.size
        if size < 2 or size & (size - 1):
            raise DomainError(f"state length {size} is not 2**q with q >= 1")
        if check:
            if not np.all(np.isfinite(amps)):
                raise DomainError("state contains NaN or Inf amplitudes")
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > STATE_TOL:
                raise DomainError(f"state is not normalized (norm {norm!r})")
        self.amplitudes = amps

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), check=False)

    def nonzero(self, tol: float = 1e-12) -> dict[str, complex]:
        """Map ket label -> amplitude for every amplitude above ``tol``."""
        q = self.num_qubits
        return {
            ket_label(int(k), q): complex(self.amplitudes[k])
            for k in np.flatnonzero(np.abs(self.amplitudes) > tol)
        }

    def to_json(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json(cls, data) -> "StateVector":
        return cls(complex_array_from_json(data))

    def __repr__(self):
        terms = " + ".join(f"({a:.4g})|{k}>" for k, a in self.nonzero(1e-9).items())
        return f"StateVector({terms or '0'})"


def ket_label(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def bits_of(value: int, n: int) -> tuple[int, ...]:
    """Binary n-string of ``value``, most significant bit first."""
    if not 0 <= value < (1 << n):
        raise DomainError(f"{value} does not fit in {n} bits")
    return tuple((value >> (n - 1 - j)) & 1 for j in range(n))


def value_of(bits: Sequence[int]) -> int:
    """Inverse of :func:`bits_of`."""
    out = 0
    for b in bits:
        if b not in (0, 1):
            raise DomainError(f"not a bit: {b!r}")
        out = (out << 1) | b
    return out


def complex_array_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise DomainError("complex numbers must be encoded as [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def basis_state(num_qubits: int, index: int) -> StateVector:
    if num_qubits < 1:
        raise DomainError("need at least one qubit")
    check_size(num_qubits)
    if not 0 <= index < (1 << num_qubits):
        raise DomainError(f"basis index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, check=False)


def check_size(num_qubits: int) -> None:
    if num_qubits > MAX_QUBITS:
        raise ResourceLimitError(
            f"{num_qubits} qubits exceeds the simulator limit of {MAX_QUBITS}"
        )


def tensor(high: StateVector, low: StateVector) -> StateVector:
    """``high ⊗ low``: ``low`` occupies the least significant wires."""
    check_size(high.num_qubits + low.num_qubits)
    return StateVector(np.kron(high.amplitudes, low.amplitudes), check=False)


# --------------------------------------------------------------------------
# kernels


@functools.lru_cache(maxsize=512)
def _swap_indices(num_qubits: int, kind: str, wires: tuple[int, ...]):
    """Index pairs exchanged by a controlled permutation gate."""
    idx = np.arange(1 << num_qubits, dtype=np.int64)

    def bit(w):
        return (idx >> w) & 1

    if kind == CNOT:
        c, t = wires
        src = idx[(bit(c) == 1) & (bit(t) == 0)]
        dst = src | (1 << t)
    elif kind == TOFFOLI:
        c1, c2, t = wires
        src = idx[(bit(c1) == 1) & (bit(c2) == 1) & (bit(t) == 0)]
        dst = src | (1 << t)
    elif kind == CSWAP:
        c, a, b = wires
        src = idx[(bit(c) == 1) & (bit(a) == 1) & (bit(b) == 0)]
        dst = src ^ ((1 << a) | (1 << b))
    else:  # pragma: no cover - guarded by caller
        raise StructuralError(f"not a permutation gate: {kind}")
    src.flags.writeable = False
    dst.flags.writeable = False
    return src, dst


def _apply_single(amps: np.ndarray, matrix: np.ndarray, wire: int) -> None:
    view = amps.reshape(-1, 2, 1 << wire)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = matrix[0, 0] * a0 + matrix[0, 1] * a1
    view[:, 1, :] = matrix[1, 0] * a0 + matrix[1, 1] * a1


_ARITY = {SINGLE: 1, ORACLE: 1, CNOT: 2, TOFFOLI: 3, CSWAP: 3}


def check_wires(kind: str, wires: Sequence[int], num_qubits: int | None = None) -> None:
    if kind not in _ARITY:
        raise StructuralError(f"unknown gate kind {kind!r}")
    if len(wires) != _ARITY[kind]:
        raise StructuralError(f"{kind} takes {_ARITY[kind]} wires, got {len(wires)}")
    if len(set(wires)) != len(wires):
        raise StructuralError(f"wire collision in {kind}{tuple(wires)}")
    for w in wires:
        if w < 0 or (num_qubits is not None and w >= num_qubits):
            raise DomainError(f"wire {w} out of range for {num_qubits} qubits")


def apply_inplace(amps: np.ndarray, kind: str, wires: tuple[int, ...], matrix=None) -> None:
    """Apply one gate to a raw amplitude array, overwriting it."""
    if kind == SINGLE:
        _apply_single(amps, matrix, wires[0])
    elif kind == ORACLE:
        raise StructuralError("oracle calls must be bound before they can be applied")
    else:
        src, dst = _swap_indices(amps.size.bit_length() - 1, kind, tuple(wires))
        amps[src], amps[dst] = amps[dst], amps[src]


def apply_gate(state: StateVector, gate) -> StateVector:
    """Return ``gate`` applied to ``state``; the input state is not modified.

    ``gate`` is anything with ``kind``, ``wires`` and (for single-qubit
    gates) ``matrix`` attributes, normally :class:`qswitch.circuit.Gate`.
    """
    wires = tuple(gate.wires)
    check_wires(gate.kind, wires, state.num_qubits)
    matrix = getattr(gate, "matrix", None) if gate.kind == SINGLE else None
    out = state.amplitudes.copy()
    apply_inplace(out, gate.kind, wires, matrix)
    return StateVector(out, check=False)


# --------------------------------------------------------------------------
# comparisons


def _same_size(a: StateVector, b: StateVector) -> None:
    if a.amplitudes.size != b.amplitudes.size:
        raise DomainError(
            f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits"
        )


def compare_states(a: StateVector, b: StateVector, tol: float = STATE_TOL) -> bool:
    """Exact amplitude comparison (global phase matters)."""
    _same_size(a, b)
    return bool(np.max(np.abs(a.amplitudes - b.amplitudes)) <= tol)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, insensitive to global phase."""
    _same_size(a, b)
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def phase_aligned_error(expected: StateVector, actual: StateVector) -> float:
    """Max amplitude error after removing the best global phase from ``actual``."""
    _same_size(expected, actual)
    overlap = np.vdot(actual.amplitudes, expected.amplitudes)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(expected.amplitudes - phase * actual.amplitudes)))


def reduce_to_wire(state: StateVector, wire: int = 0, tol: float = STATE_TOL) -> StateVector:
    """Pure state of one wire, provided it is unentangled from the rest.

    The global phase of the result is not meaningful: a product
    ``a ⊗ v`` only fixes ``v`` up to a phase.

    Raises:
        DomainError: if the wire is entangled with the other wires.
    """
    q = state.num_qubits
    if not 0 <= wire < q:
        raise DomainError(f"wire {wire} out of range for {q} qubits")
    m = np.moveaxis(state.amplitudes.reshape((2,) * q), q - 1 - wire, -1).reshape(-1, 2)
    row = m[np.argmax(np.linalg.norm(m, axis=1))]
    v = row / np.linalg.norm(row)
    residual = m - np.outer(m @ v.conj(), v)
    if np.linalg.norm(residual) > tol:
        raise DomainError(f"wire {wire} is entangled with the rest of the register")
    return StateVector(v, check=False)


# --------------------------------------------------------------------------
# unitaries


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(matrix, dtype=complex)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        return False
    return bool(np.max(np.abs(m.conj().T @ m - I2)) <= tol)


def as_unitary2(matrix) -> np.ndarray:
    """Validate and return a 2x2 unitary as a complex array."""
    m = np.array(matrix, dtype=complex)
    if not is_unitary(m):
        raise DomainError(f"not a 2x2 unitary:\n{m}")
    return m


def haar_random_unitary(seed) -> np.ndarray:
    """Haar-distributed 2x2 unitary, deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def product_in_order(unitaries: Sequence[np.ndarray], order: Iterable[int]) -> np.ndarray:
    """``U[order[-1]] ... U[order[0]]``: ``order[0]`` acts first."""
    out = I2.copy()
    for idx in order:
        if not 0 <= idx < len(unitaries):
            raise DomainError(f"order index {idx} out of range for {len(unitaries)} unitaries")
        out = np.asarray(unitaries[idx]) @ out
    return out


def unitary_to_json(matrix: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)]


def unitary_from_json(data) -> np.ndarray:
    m = complex_array_from_json(data)
    if m.shape != (2, 2):
        raise DomainError(f"unitary must be 2x2, got shape {m.shape}")
    return as_unitary2(m)
