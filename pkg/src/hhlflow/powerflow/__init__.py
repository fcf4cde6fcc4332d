"""AC power flow front end: case files, network matrices and iterative solvers."""
from .case import (BUNDLED, PQ, PV, REF, CaseParseError, PowerFlowCase, load_bundled, load_case,
                   parse_case, resolve_case, save_case, serialize_case)
from .network import (LinearStep, NetworkError, PowerFlowState, bdoubleprime_matrix,
                      bdoubleprime_system, bprime_matrix, bprime_system, build_ybus,
                      flat_start, jacobian, mismatch, power_injection)
from .solver import (SOLVERS, VARIANTS, HHLOptions, PowerFlowError, PowerFlowResult,
                     solve_powerflow, solve_step)


def export_step(step: LinearStep, matrix_path, rhs_path) -> None:
    """Write a linear step as MatrixMarket matrix and vector files."""
    from ..mmio import write_matrix, write_vector

    write_matrix(matrix_path, step.matrix, comment=f"{step.kind} step")
    write_vector(rhs_path, step.rhs, comment=" ".join(step.variable_labels))


__all__ = [
    "BUNDLED", "PQ", "PV", "REF", "CaseParseError", "HHLOptions", "LinearStep", "NetworkError",
    "PowerFlowCase", "PowerFlowError", "PowerFlowResult", "PowerFlowState", "SOLVERS",
    "VARIANTS", "bdoubleprime_matrix", "bdoubleprime_system", "bprime_matrix", "bprime_system",
    "build_ybus", "export_step", "flat_start", "jacobian", "load_bundled", "load_case",
    "mismatch", "parse_case", "power_injection", "resolve_case", "save_case", "serialize_case",
    "solve_powerflow", "solve_step",
]
