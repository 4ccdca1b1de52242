"""Triangular networks of quantum switches.

A switch ``S(i, k)`` (``1 <= i <= k <= N-1``) has two input and two output
ports.  With control bit ``c`` it sends ``in_j`` to ``out_(j XOR c)``:
``c = 0`` passes straight through, ``c = 1`` crosses.

Port orientation:

* ``in0`` receives the forward link (from ``U_0``, ``S(1, k-1)`` or
  ``S(i-1, k-1)``); ``in1`` receives the down-chain link (from ``U_k``
  or ``S(i+1, k)``).
* ``out0`` feeds the lower-indexed destination, ``out1`` the higher one,
  where a switch is indexed by its row ``i`` and an output slot by its
  slot number.

Control bits are ordered by sorting switches on ``(k, i)``.  Position
``w`` in that order is bit ``w`` of an assignment index and wire ``w``
of a coherent control register.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from qswitch import qcore
from qswitch.errors import DomainError, ResourceLimitError, StructuralError
from qswitch.qcore import StateVector

# Largest N for which the full assignment table is materialized (2**21 rows).
MAX_TABLE_N = 7
# Largest N for streamed surjectivity checks (2**28 assignments).
MAX_ENUM_N = 8
_CHUNK = 1 << 20


@dataclass(frozen=True)
class SwitchId:
    i: int
    k: int

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.k, self.i)

    def __str__(self):
        return f"{self.i}.{self.k}"

    @classmethod
    def parse(cls, text: str) -> "SwitchId":
        i, k = text.split(".")
        return cls(int(i), int(k))


@dataclass(frozen=True)
class ChannelInput:
    label: int


@dataclass(frozen=True)
class ChannelOutput:
    slot: int


@dataclass(frozen=True)
class Port:
    owner: SwitchId | ChannelInput | ChannelOutput
    side: str

    def to_json(self) -> dict:
        o = self.owner
        if isinstance(o, SwitchId):
            return {"type": "switch", "i": o.i, "k": o.k, "side": self.side}
        if isinstance(o, ChannelInput):
            return {"type": "input", "label": o.label}
        return {"type": "output", "slot": o.slot}

    @classmethod
    def from_json(cls, data: Mapping) -> "Port":
        kind = data["type"]
        if kind == "switch":
            return cls(SwitchId(int(data["i"]), int(data["k"])), data["side"])
        if kind == "input":
            return cls(ChannelInput(int(data["label"])), "out0")
        if kind == "output":
            return cls(ChannelOutput(int(data["slot"])), "in0")
        raise StructuralError(f"unknown port type {kind!r}")


@dataclass(frozen=True)
class SwitchNetwork:
    N: int
    switches: tuple[SwitchId, ...]
    wiring: Mapping[Port, Port] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "switches", tuple(sorted(self.switches, key=lambda s: s.sort_key)))
        object.__setattr__(self, "wiring", dict(self.wiring))
        _validate(self)

    @property
    def num_switches(self) -> int:
        return len(self.switches)

    def switch_position(self) -> dict[SwitchId, int]:
        return {s: w for w, s in enumerate(self.switches)}

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "switches": [{"i": s.i, "k": s.k} for s in self.switches],
            "wiring": [{"from": a.to_json(), "to": b.to_json()} for a, b in self.wiring.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SwitchNetwork":
        return cls(
            int(data["N"]),
            tuple(SwitchId(int(s["i"]), int(s["k"])) for s in data["switches"]),
            {Port.from_json(e["from"]): Port.from_json(e["to"]) for e in data["wiring"]},
        )


def _validate(net: SwitchNetwork) -> None:
    N = net.N
    sources = {Port(ChannelInput(l), "out0") for l in range(N)}
    sinks = {Port(ChannelOutput(s), "in0") for s in range(N)}
    for s in net.switches:
        sources |= {Port(s, "out0"), Port(s, "out1")}
        sinks |= {Port(s, "in0"), Port(s, "in1")}
    if set(net.wiring) != sources:
        raise StructuralError("wiring does not start at every output port exactly once")
    targets = list(net.wiring.values())
    if len(set(targets)) != len(targets) or set(targets) != sinks:
        raise StructuralError("wiring is not a bijection onto the input ports")
    topological_order(net)


def topological_order(net: SwitchNetwork, reverse_ties: bool = False) -> list[SwitchId]:
    """Kahn ordering of the switches; ties broken by (k, i), optionally reversed."""
    preds: dict[SwitchId, set[SwitchId]] = {s: set() for s in net.switches}
    for src, dst in net.wiring.items():
        if isinstance(src.owner, SwitchId) and isinstance(dst.owner, SwitchId):
            preds[dst.owner].add(src.owner)
    order = []
    ready = [s for s, p in preds.items() if not p]
    done: set[SwitchId] = set()
    while ready:
        ready.sort(key=lambda s: s.sort_key, reverse=reverse_ties)
        s = ready.pop(0)
        order.append(s)
        done.add(s)
        for t, p in preds.items():
            if t not in done and t not in ready and t not in order and p <= done:
                ready.append(t)
    if len(order) != len(net.switches):
        raise StructuralError("switch network contains a cycle")
    return order


def build_network(N: int) -> SwitchNetwork:
    """Network connecting ``U_0 .. U_(N-1)`` to output slots ``0 .. N-1``."""
    if N < 2:
        raise DomainError("a switch network needs N >= 2")
    S = SwitchId
    U = ChannelInput
    slot = ChannelOutput
    forward: list[tuple] = []
    down: list[tuple] = []

    # U_0 -> S(1,1) -> S(1,2) -> ... -> S(1,N-1) -> slot 0
    row = [U(0)] + [S(1, k) for k in range(1, N)] + [slot(0)]
    forward += list(zip(row, row[1:]))
    # S(i,k) -> S(i+1,k+1)
    forward += [(S(i, k), S(i + 1, k + 1)) for k in range(1, N - 1) for i in range(1, k + 1)]
    # U_k -> S(k,k) -> S(k-1,k) -> ... -> S(1,k)
    for k in range(1, N):
        col = [U(k)] + [S(i, k) for i in range(k, 0, -1)]
        down += list(zip(col, col[1:]))
    # S(i,N-1) -> slot i
    forward += [(S(i, N - 1), slot(i)) for i in range(1, N)]

    def rank(owner) -> int:
        return owner.i if isinstance(owner, SwitchId) else owner.slot

    outgoing: dict = {}
    for src, dst in forward + down:
        outgoing.setdefault(src, []).append(dst)
    in_side = {(src, dst): "in0" for src, dst in forward}
    in_side.update({(src, dst): "in1" for src, dst in down})

    wiring = {}
    for src, dsts in outgoing.items():
        if isinstance(src, SwitchId):
            dsts = sorted(dsts, key=rank)
            sides = ("out0", "out1")
        else:
            sides = ("out0",)
        if len(dsts) != len(sides):
            raise StructuralError(f"{src} has {len(dsts)} outgoing links")
        for side, dst in zip(sides, dsts):
            to_side = in_side[(src, dst)] if isinstance(dst, SwitchId) else "in0"
            wiring[Port(src, side)] = Port(dst, to_side)
    switches = [S(i, k) for k in range(1, N) for i in range(1, k + 1)]
    return SwitchNetwork(N, tuple(switches), wiring)


@dataclass(frozen=True)
class ControlAssignment:
    bits: Mapping[SwitchId, int]

    @classmethod
    def from_index(cls, net: SwitchNetwork, index: int) -> "ControlAssignment":
        if not 0 <= index < (1 << net.num_switches):
            raise DomainError(f"assignment index {index} out of range")
        return cls({s: (index >> w) & 1 for w, s in enumerate(net.switches)})

    @classmethod
    def from_bits(cls, net: SwitchNetwork, bits: Sequence[int]) -> "ControlAssignment":
        """Bits listed in (k, i) switch order."""
        if len(bits) != net.num_switches:
            raise DomainError(f"need {net.num_switches} bits, got {len(bits)}")
        return cls(dict(zip(net.switches, (int(b) for b in bits))))

    def bit_tuple(self, net: SwitchNetwork) -> tuple[int, ...]:
        return tuple(self.bits[s] for s in net.switches)

    def index(self, net: SwitchNetwork) -> int:
        return sum(b << w for w, b in enumerate(self.bit_tuple(net)))

    def to_json(self) -> dict:
        return {"bits": {str(s): int(b) for s, b in sorted(self.bits.items(), key=lambda x: x[0].sort_key)}}

    @classmethod
    def from_json(cls, data: Mapping) -> "ControlAssignment":
        return cls({SwitchId.parse(key): int(b) for key, b in data["bits"].items()})


@dataclass(frozen=True)
class Permutation:
    """Output slot ``j`` carries channel ``sigma[j]``."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(x) for x in self.sigma))
        if sorted(self.sigma) != list(range(len(self.sigma))):
            raise DomainError(f"{self.sigma} is not a permutation")

    def product_string(self) -> str:
        return "".join(f"U{j}" for j in reversed(self.sigma))

    def unitary(self, unitaries: Sequence[np.ndarray]) -> np.ndarray:
        return qcore.product_in_order(unitaries, self.sigma)


def evaluate(net: SwitchNetwork, assignment: ControlAssignment, order: Iterable[SwitchId] | None = None) -> Permutation:
    """Route channel labels through the network under one control assignment."""
    missing = [s for s in net.switches if s not in assignment.bits]
    if missing:
        raise DomainError(f"no control bit for switches {[str(s) for s in missing]}")
    values: dict[Port, int] = {}
    for label in range(net.N):
        values[net.wiring[Port(ChannelInput(label), "out0")]] = label
    for s in topological_order(net) if order is None else order:
        c = assignment.bits[s]
        if c not in (0, 1):
            raise DomainError(f"control bit for {s} must be 0 or 1")
        inputs = (values[Port(s, "in0")], values[Port(s, "in1")])
        values[net.wiring[Port(s, "out0")]] = inputs[c]
        values[net.wiring[Port(s, "out1")]] = inputs[1 - c]
    return Permutation(tuple(values[Port(ChannelOutput(j), "in0")] for j in range(net.N)))


@lru_cache(maxsize=32)
def _compiled(N: int) -> tuple:
    """Switch program for :func:`evaluate_batch`: port-slot indices per switch."""
    net = build_network(N)
    pos = net.switch_position()
    slot_of: dict[Port, int] = {}

    def slot(port: Port) -> int:
        return slot_of.setdefault(port, len(slot_of))

    inputs = [slot(net.wiring[Port(ChannelInput(l), "out0")]) for l in range(N)]
    steps = []
    for s in topological_order(net):
        steps.append((
            pos[s],
            slot(Port(s, "in0")),
            slot(Port(s, "in1")),
            slot(net.wiring[Port(s, "out0")]),
            slot(net.wiring[Port(s, "out1")]),
        ))
    outputs = [slot(Port(ChannelOutput(j), "in0")) for j in range(N)]
    return tuple(inputs), tuple(steps), tuple(outputs), len(slot_of)


def evaluate_batch(net: SwitchNetwork, indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evaluate` over assignment indices; returns (len, N) sigmas."""
    if net != build_network(net.N):
        raise DomainError("batch evaluation supports canonical networks only")
    inputs, steps, outputs, nslots = _compiled(net.N)
    idx = np.asarray(indices, dtype=np.int64)
    ports = np.empty((nslots, idx.size), dtype=np.int8)
    for label, p in enumerate(inputs):
        ports[p] = label
    for w, in0, in1, out0, out1 in steps:
        c = ((idx >> w) & 1).astype(bool)
        a, b = ports[in0], ports[in1]
        ports[out0] = np.where(c, b, a)
        ports[out1] = np.where(c, a, b)
    return ports[list(outputs)].T.copy()


def _lehmer_rank(sigmas: np.ndarray) -> np.ndarray:
    """Lexicographic rank of each row permutation."""
    n = sigmas.shape[1]
    rank = np.zeros(sigmas.shape[0], dtype=np.int64)
    for j in range(n):
        smaller = (sigmas[:, j + 1:] < sigmas[:, j:j + 1]).sum(axis=1)
        rank += smaller * math.factorial(n - 1 - j)
    return rank


def _unrank(rank: int, n: int) -> tuple[int, ...]:
    pool = list(range(n))
    out = []
    for j in range(n):
        f = math.factorial(n - 1 - j)
        q, rank = divmod(rank, f)
        out.append(pool.pop(q))
    return tuple(out)


def permutation_table(net: SwitchNetwork) -> np.ndarray:
    """Permutation for every assignment: row ``a`` is the sigma of assignment index ``a``."""
    if net.N > MAX_TABLE_N:
        raise ResourceLimitError(
            f"table for N = {net.N} has 2**{net.num_switches} rows (limit N <= {MAX_TABLE_N})"
        )
    return evaluate_batch(net, np.arange(1 << net.num_switches))


@dataclass
class SurjectivityReport:
    N: int
    assignments: int
    surjective: bool
    histogram: dict[tuple[int, ...], int]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "assignments": self.assignments,
            "permutations_reached": len(self.histogram),
            "permutations_total": math.factorial(self.N),
            "surjective": self.surjective,
            "histogram": [
                {"sigma": list(p), "count": c} for p, c in sorted(self.histogram.items())
            ],
        }


def check_all_permutations(net: SwitchNetwork) -> SurjectivityReport:
    """Enumerate every assignment and count how often each permutation appears."""
    if net.N > MAX_ENUM_N:
        raise ResourceLimitError(f"exhaustive enumeration limited to N <= {MAX_ENUM_N}")
    N = net.N
    total = 1 << net.num_switches
    full = (1 << N) - 1
    counts = np.zeros(math.factorial(N), dtype=np.int64)
    for start in range(0, total, _CHUNK):
        sig = evaluate_batch(net, np.arange(start, min(total, start + _CHUNK)))
        mask = np.bitwise_or.reduce(np.left_shift(1, sig.astype(np.int64)), axis=1)
        if np.any(mask != full):
            raise StructuralError("network produced a non-bijective routing")
        counts += np.bincount(_lehmer_rank(sig), minlength=counts.size)
    histogram = {_unrank(int(r), N): int(c) for r, c in enumerate(counts) if c}
    return SurjectivityReport(N, total, len(histogram) == counts.size, histogram)


@lru_cache(maxsize=16)
def _first_assignment(N: int) -> dict[tuple[int, ...], int]:
    table = permutation_table(build_network(N))
    first: dict[tuple[int, ...], int] = {}
    for a in range(table.shape[0] - 1, -1, -1):
        first[tuple(int(x) for x in table[a])] = a
    return first


def assignment_for(net: SwitchNetwork, sigma: Sequence[int]) -> ControlAssignment:
    """Lowest-index assignment realizing ``sigma``."""
    try:
        index = _first_assignment(net.N)[tuple(sigma)]
    except KeyError:
        raise DomainError(f"{tuple(sigma)} is not reachable on the N = {net.N} network") from None
    return ControlAssignment.from_index(net, index)


def uses_per_channel(net: SwitchNetwork) -> dict[int, int]:
    counts = Counter(p.owner.label for p in net.wiring if isinstance(p.owner, ChannelInput))
    return dict(sorted(counts.items()))


def simulate_coherent(net: SwitchNetwork, unitaries: Sequence[np.ndarray], control_state: StateVector, psi: StateVector) -> StateVector:
    """Joint output ``sum_b alpha_b |b> ⊗ Z_b psi``.

    The target qubit is wire 0; control wire ``w`` (switch ``w`` in
    (k, i) order) is joint wire ``w + 1``.
    """
    m = net.num_switches
    if len(unitaries) != net.N:
        raise DomainError(f"expected {net.N} unitaries, got {len(unitaries)}")
    if control_state.num_qubits != m:
        raise DomainError(f"control state has {control_state.num_qubits} qubits, network has {m} switches")
    if psi.num_qubits != 1:
        raise DomainError("psi must be a single-qubit state")
    if abs(control_state.norm - 1.0) > qcore.STATE_TOL:
        raise DomainError("control state is not normalized")
    qcore.check_size(m + 1)
    us = [qcore.as_unitary2(u) for u in unitaries]

    alpha = control_state.amplitudes
    live = np.flatnonzero(alpha != 0)
    out = np.zeros((1 << m, 2), dtype=complex)
    if live.size:
        sig = evaluate_batch(net, live)
        ranks = _lehmer_rank(sig)
        distinct, first, inverse = np.unique(ranks, return_index=True, return_inverse=True)
        images = np.array([qcore.product_in_order(us, sig[f]) @ psi.amplitudes for f in first])
        out[live] = alpha[live, None] * images[inverse.reshape(-1)]
    return StateVector(out.reshape(-1), check=False)


def all_assignments(net: SwitchNetwork) -> Iterable[ControlAssignment]:
    """Every assignment, in assignment-index order."""
    for index in range(1 << net.num_switches):
        yield ControlAssignment.from_index(net, index)
