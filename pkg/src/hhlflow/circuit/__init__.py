"""Circuit representation, gate matrices and basis-gate transpilation."""
from .core import (Circuit, append, circuit_unitary, embed_gate, equal_up_to_phase,
                   inverse_gate)
from .gates import Gate, GateError, GateKind, gate_matrix
from .textio import CircuitParseError, dumps, loads
from .transpile import decompose_unitary, multiplexed_rotation, transpile

__all__ = [
    "Circuit", "Gate", "GateError", "GateKind", "CircuitParseError",
    "append", "circuit_unitary", "decompose_unitary", "dumps", "embed_gate",
    "equal_up_to_phase", "gate_matrix", "inverse_gate", "loads",
    "multiplexed_rotation", "transpile",
]
