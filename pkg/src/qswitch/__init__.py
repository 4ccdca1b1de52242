"""Programmable orderings of black-box unitaries: controlled-swap circuits and quantum-switch networks."""

from qswitch.circuit import Circuit, Gate, ResourceReport, count_resources, invert, lower_controlled_swaps, simulate
from qswitch.errors import (
    BindingError,
    DomainError,
    InversionError,
    QSwitchError,
    ResourceLimitError,
    StructuralError,
)
from qswitch.permcircuits import (
    DispositionProgram,
    build_disposition_circuit,
    build_n_controlled_swap,
    build_select_circuit,
    run_disposition,
    run_disposition_coherent,
    run_select,
)
from qswitch.qcore import StateVector, apply_gate, basis_state, haar_random_unitary, product_in_order
from qswitch.switchnet import ControlAssignment, Permutation, SwitchNetwork, build_network, evaluate, simulate_coherent

__version__ = "0.1.0"
