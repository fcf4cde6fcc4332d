"""HHL circuit synthesis, resource estimation and simulated solves."""
from .resources import (ResourceError, ResourcePlan, estimate_resources, plan_for_matrix,
                        qpe_bits)
from .solver import HHLError, HHLSolution, solve, solve_linear_system
from .synthesis import (SynthesisError, ancilla_qubit, build_hhl_circuit, build_qpe,
                        build_state_prep, controlled_powers, data_qubits, fixed_point_plan,
                        inversion_angles, inversion_gates, phase_qubits, qft_gates,
                        signed_reading)

__all__ = [
    "HHLError", "HHLSolution", "ResourceError", "ResourcePlan", "SynthesisError",
    "ancilla_qubit", "build_hhl_circuit", "build_qpe", "build_state_prep",
    "controlled_powers", "data_qubits", "estimate_resources", "fixed_point_plan",
    "inversion_angles", "inversion_gates", "phase_qubits", "plan_for_matrix", "qft_gates",
    "signed_reading", "solve", "solve_linear_system",
]
