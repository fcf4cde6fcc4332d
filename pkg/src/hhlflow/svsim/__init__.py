"""Statevector simulator with per-gate-kind kernels."""
from . import backend
from .state import (MAX_QUBITS, MeasurementResult, SimulationError, StateVector, apply_dense,
                    apply_gate, dump_state, from_amplitudes, init_state, load_state, marginal,
                    postselect, postselect_many, probabilities, run, sample)

__all__ = [
    "MAX_QUBITS", "MeasurementResult", "SimulationError", "StateVector", "apply_dense",
    "apply_gate", "backend", "dump_state", "from_amplitudes", "init_state", "load_state",
    "marginal", "postselect", "postselect_many", "probabilities", "run", "sample",
]
