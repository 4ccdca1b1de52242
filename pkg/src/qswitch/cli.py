"""Command-line entry point.

Every subcommand prints one JSON document.  Exit codes: 0 success,
1 verification failure, 2 usage or input error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from qswitch import circuit as circ
from qswitch import permcircuits, qcore, switchnet, verify
from qswitch.errors import QSwitchError, ResourceLimitError
from qswitch.golden import ROUTING_TABLE_N3
from qswitch.qcore import StateVector

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_LIMIT = 3

# Rows are listed individually up to this N; beyond it only the histogram.
MAX_TABLE_ROWS_N = 6


class UsageError(QSwitchError):
    pass


@dataclass
class CommandOutcome:
    exit_code: int
    payload: dict


def _complex(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _state_payload(state: StateVector) -> dict:
    return {
        "num_qubits": state.num_qubits,
        "amplitudes": state.to_json(),
        "nonzero": {k: _complex(a) for k, a in state.nonzero(1e-12).items()},
    }


# --------------------------------------------------------------------------
# commands


def cmd_verify_table(N: int) -> CommandOutcome:
    if not 2 <= N <= switchnet.MAX_ENUM_N:
        raise UsageError(f"verify-table needs 2 <= N <= {switchnet.MAX_ENUM_N}")
    net = switchnet.build_network(N)
    report = switchnet.check_all_permutations(net)
    payload: dict[str, Any] = {
        "N": N,
        "switches": [str(s) for s in net.switches],
        "assignments": report.assignments,
        "permutations_reached": len(report.histogram),
        "permutations_total": math.factorial(N),
        "surjective": report.surjective,
    }
    ok = report.surjective
    if N <= MAX_TABLE_ROWS_N:
        table = switchnet.permutation_table(net)
        rows = []
        for a, sigma in enumerate(table):
            perm = switchnet.Permutation(tuple(sigma))
            rows.append({
                "bits": list(switchnet.ControlAssignment.from_index(net, a).bit_tuple(net)),
                "sigma": list(perm.sigma),
                "product": perm.product_string(),
            })
        payload["rows"] = rows
    else:
        payload["rows_omitted"] = True
    payload["multiplicities"] = sorted(report.histogram.values(), reverse=True)
    if N == 3:
        produced = {tuple(r["bits"]): r["product"] for r in payload["rows"]}
        mismatches = [
            {"bits": list(bits), "expected": want, "got": produced.get(bits)}
            for bits, want in ROUTING_TABLE_N3.items()
            if produced.get(bits) != want
        ]
        payload["golden_match"] = not mismatches and len(produced) == len(ROUTING_TABLE_N3)
        payload["golden_mismatches"] = mismatches
        ok = ok and payload["golden_match"]
    return CommandOutcome(EXIT_OK if ok else EXIT_FAILED, payload)


def _circuit_resources(task: str, N: int) -> tuple[dict, dict]:
    n = permcircuits.log2_exact(N)
    if task == "select":
        c = permcircuits.build_select_circuit(n)
        stages = 1
    else:
        c = permcircuits.build_disposition_circuit(N)
        stages = N
    raw = circ.count_resources(c)
    lowered = circ.count_resources(circ.lower_controlled_swaps(c), lower_toffoli=True)
    ncswap = circ.count_resources(permcircuits.build_n_controlled_swap(n))
    counted = {
        "cnot_count": lowered.cnot_count,
        "single_qubit_count": lowered.single_qubit_count,
        "controlled_swap_count": raw.controlled_swap_count,
        "controlled_swaps_per_n_controlled_swap": ncswap.controlled_swap_count,
        "control_qubits": raw.control_qubits,
        "ancilla_qubits": raw.ancilla_qubits,
        "uses_per_channel": sorted(set(raw.oracle_uses.values())),
    }
    formula = {
        "cnot_count": 16 * stages * (N - 1),
        "single_qubit_count": 18 * stages * (N - 1),
        "controlled_swap_count": 2 * stages * (N - 1),
        "controlled_swaps_per_n_controlled_swap": N - 1,
        "control_qubits": stages * n,
        "ancilla_qubits": N - 1,
        "uses_per_channel": [stages],
    }
    return counted, formula


def cmd_resources(task: str, N: int) -> CommandOutcome:
    if task in ("select", "disposition"):
        if N < 2 or N & (N - 1):
            raise UsageError(f"{task} circuits need N a power of two >= 2, got {N}")
        counted, formula = _circuit_resources(task, N)
    elif task == "switch":
        if N < 2:
            raise UsageError("switch networks need N >= 2")
        net = switchnet.build_network(N)
        counted = {
            "switches": net.num_switches,
            "control_qubits": net.num_switches,
            "uses_per_channel": sorted(set(switchnet.uses_per_channel(net).values())),
        }
        formula = {
            "switches": N * (N - 1) // 2,
            "control_qubits": N * (N - 1) // 2,
            "uses_per_channel": [1],
        }
    else:
        raise UsageError(f"unknown task {task!r}")
    match = counted == formula
    payload = {"task": task, "N": N, "counted": counted, "formula": formula, "match": match}
    return CommandOutcome(EXIT_OK if match else EXIT_FAILED, payload)


def _load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_unitaries(path) -> list[np.ndarray]:
    if path is None:
        return []
    data = _load_json(path)
    if isinstance(data, dict):
        data = data["unitaries"]
    return [qcore.unitary_from_json(u) for u in data]


_PSI_SHORTHAND = {
    "0": [1, 0],
    "1": [0, 1],
    "+": [1 / math.sqrt(2), 1 / math.sqrt(2)],
    "-": [1 / math.sqrt(2), -1 / math.sqrt(2)],
}


def parse_state(data, num_qubits: int | None = None) -> StateVector:
    """State from JSON: ``[[re, im], ...]``, ``"+"`` (|+> on every wire) or a ket label."""
    if isinstance(data, str):
        if data == "+" or data == "-":
            if num_qubits is None:
                raise UsageError(f"cannot size {data!r} without a wire count")
            one = np.array(_PSI_SHORTHAND[data], dtype=complex)
            amps = np.ones(1, dtype=complex)
            for _ in range(num_qubits):
                amps = np.kron(amps, one)
            return StateVector(amps)
        if set(data) <= {"0", "1"} and data:
            if num_qubits is not None and len(data) != num_qubits:
                raise UsageError(f"ket {data!r} has {len(data)} wires, expected {num_qubits}")
            return qcore.basis_state(len(data), int(data, 2))
        raise UsageError(f"unrecognized state shorthand {data!r}")
    state = StateVector.from_json(data)
    if num_qubits is not None and state.num_qubits != num_qubits:
        raise UsageError(f"state has {state.num_qubits} wires, expected {num_qubits}")
    return state


def _simulate_circuit(spec: dict, unitaries, inp: dict, branches: bool, strict: bool) -> dict:
    if "gates" in spec:
        c = circ.Circuit.from_json(spec)
        if branches:
            raise UsageError("--branches applies to disposition programs only")
        qcore.check_size(c.num_qubits)
        state = parse_state(inp["state"], c.num_qubits)
        return {"output": _state_payload(circ.simulate(c, state, unitaries))}
    psi = parse_state(inp.get("psi", "0"), 1)
    if "select" in spec:
        out = permcircuits.run_select(unitaries, int(spec["select"]), psi, strict=strict)
        return {"wire0": _state_payload(out)}
    program = permcircuits.DispositionProgram.from_json(spec)
    if len(unitaries) != program.N:
        raise UsageError(f"program needs {program.N} unitaries, got {len(unitaries)}")
    N = program.N
    if N & (N - 1) and "control" not in inp and not branches:
        # Padded run; only the data qubit is meaningful.
        return {"wire0": _state_payload(permcircuits.run_disposition(unitaries, program, psi))}
    n = permcircuits.log2_exact(N)
    if "control" in inp:
        control = parse_state(inp["control"], N * n)
    else:
        value = sum(i << (t * n) for t, i in enumerate(program.indices))
        control = qcore.basis_state(N * n, value)
    joint = permcircuits.run_disposition_coherent(unitaries, control, psi)
    result = {"output": _state_payload(joint)}
    if branches:
        result["branches"] = [
            {"indices": list(key), "probability": p, "wire0": s.to_json()}
            for key, (p, s) in sorted(permcircuits.branch_states(joint, N).items())
        ]
    return result


def _simulate_switch(spec: dict, unitaries, inp: dict, branches: bool) -> dict:
    net = switchnet.SwitchNetwork.from_json(spec) if "switches" in spec else switchnet.build_network(int(spec["N"]))
    m = net.num_switches
    psi = parse_state(inp.get("psi", "0"), 1)
    control = inp.get("control", "0" * m)
    if isinstance(control, dict):
        assignment = switchnet.ControlAssignment.from_json(control)
        control = qcore.basis_state(m, assignment.index(net))
    else:
        control = parse_state(control, m)
    if len(unitaries) != net.N:
        raise UsageError(f"network needs {net.N} unitaries, got {len(unitaries)}")
    joint = switchnet.simulate_coherent(net, unitaries, control, psi)
    result = {"output": _state_payload(joint)}
    if branches:
        rows = []
        for b in np.flatnonzero(np.abs(control.amplitudes) > 1e-12):
            perm = switchnet.evaluate(net, switchnet.ControlAssignment.from_index(net, int(b)))
            rows.append({
                "control": qcore.ket_label(int(b), m),
                "probability": float(abs(control.amplitudes[b]) ** 2),
                "product": perm.product_string(),
                "target": StateVector(perm.unitary(unitaries) @ psi.amplitudes, check=False).to_json(),
            })
        result["branches"] = rows
    return result


def cmd_simulate(model: str, spec_file, unitaries_file=None, input_file=None, branches: bool = False, strict: bool = False) -> CommandOutcome:
    spec = _load_json(spec_file)
    unitaries = _load_unitaries(unitaries_file)
    inp = _load_json(input_file) if input_file else {}
    try:
        if model == "circuit":
            result = _simulate_circuit(spec, unitaries, inp, branches, strict)
        elif model == "switch":
            result = _simulate_switch(spec, unitaries, inp, branches)
        else:
            raise UsageError(f"unknown model {model!r}")
    except KeyError as exc:
        if isinstance(exc, QSwitchError):
            raise
        raise UsageError(f"missing field {exc}") from None
    return CommandOutcome(EXIT_OK, {"model": model, **result})


def cmd_compare(N: int, trials: int, seed: int) -> CommandOutcome:
    if N not in (2, 4):
        raise UsageError("compare needs N in {2, 4} (the circuit model needs a power of two)")
    report = verify.cross_model_check(N, trials, seed)
    uses = {model: sorted(set(u.values())) for model, u in report.uses.items()}
    payload = {"N": N, "trials": trials, "seed": seed, "report": report.to_json(), "uses_per_channel": uses}
    return CommandOutcome(EXIT_OK if report.ok else EXIT_FAILED, payload)


def cmd_export(kind: str, N: int) -> CommandOutcome:
    if kind == "network":
        return CommandOutcome(EXIT_OK, switchnet.build_network(N).to_json())
    try:
        n = permcircuits.log2_exact(N)
    except QSwitchError as exc:
        raise UsageError(str(exc)) from None
    if kind == "ncswap":
        c = permcircuits.build_n_controlled_swap(n)
    elif kind == "select":
        c = permcircuits.build_select_circuit(n)
    elif kind == "disposition":
        c = permcircuits.build_disposition_circuit(N)
    else:
        raise UsageError(f"unknown export kind {kind!r}")
    return CommandOutcome(EXIT_OK, c.to_json())


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=Path, help="write the JSON document here instead of stdout")

    p = argparse.ArgumentParser(prog="qswitch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-table", parents=[common], help="enumerate a switch network's routing table")
    s.add_argument("--n", type=int, default=3)

    s = sub.add_parser("resources", parents=[common], help="count gates, qubits and oracle uses")
    s.add_argument("--task", choices=["select", "disposition", "switch"], required=True)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate a circuit or switch network")
    s.add_argument("--model", choices=["circuit", "switch"], required=True)
    s.add_argument("--spec", required=True, help="circuit, program or network JSON")
    s.add_argument("--unitaries", help="JSON list of 2x2 unitaries")
    s.add_argument("--input", help="JSON with psi / control / state")
    s.add_argument("--branches", action="store_true", help="report per-branch outputs")
    s.add_argument("--strict", action="store_true", help="reject select indices that address padded slots")

    s = sub.add_parser("compare", parents=[common], help="cross-check circuit model against switch network")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)

    s = sub.add_parser("export", parents=[common], help="emit circuit or network JSON")
    s.add_argument("--kind", choices=["ncswap", "select", "disposition", "network"], required=True)
    s.add_argument("--n", type=int, required=True)
    return p


def run(args: argparse.Namespace) -> CommandOutcome:
    if args.command == "verify-table":
        return cmd_verify_table(args.n)
    if args.command == "resources":
        return cmd_resources(args.task, args.n)
    if args.command == "simulate":
        return cmd_simulate(args.model, args.spec, args.unitaries, args.input, args.branches, args.strict)
    if args.command == "compare":
        return cmd_compare(args.n, args.trials, args.seed)
    return cmd_export(args.kind, args.n)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        outcome = run(args)
    except ResourceLimitError as exc:
        outcome = CommandOutcome(EXIT_LIMIT, {"error": str(exc)})
    except (QSwitchError, ValueError, KeyError, TypeError) as exc:
        outcome = CommandOutcome(EXIT_USAGE, {"error": str(exc)})
    text = json.dumps(outcome.payload, indent=2) + "\n"
    if getattr(args, "output", None):
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
