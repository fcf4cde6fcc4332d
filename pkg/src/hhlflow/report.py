"""Run reports: one record per linear solve, plus JSON schemas for CLI output."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass
class SolveReport:
    """Outcome of one linear solve, classical or HHL."""

    case_name: str
    matrix_size: int
    condition_number: float
    solver: str = "hhl"
    n_data: int = 0
    n_qpe: int = 0
    n_neg_val: int = 0
    n_total: int = 0
    n_qubits: int = 0
    circuit_generation_seconds: float = 0.0
    simulation_seconds: float = 0.0
    l2_error: float = 0.0
    preconditioned: bool = False
    original_condition_number: float | None = None
    success_probability: float | None = None
    gate_count: int | None = None
    fusion: dict | None = None
    iteration: int | None = None
    step_kind: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.l2_error < 0:
            raise ValueError("l2_error must be non-negative")
        if self.circuit_generation_seconds < 0 or self.simulation_seconds < 0:
            raise ValueError("timings must be non-negative")

    def to_dict(self, timings: bool = True) -> dict:
        d = _plain(asdict(self))
        if not timings:
            d.pop("circuit_generation_seconds")
            d.pop("simulation_seconds")
        return d


def _plain(obj):
    """Convert numpy scalars/arrays inside ``obj`` to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def to_jsonable(obj):
    return _plain(obj)


TABLE_ROWS = (
    ("Matrix size", lambda r: f"{r.matrix_size} x {r.matrix_size}"),
    ("Condition number", lambda r: f"{r.condition_number:.1f}"),
    ("n_total", lambda r: str(r.n_total)),
    ("n_data", lambda r: str(r.n_data)),
    ("n_QPE", lambda r: str(r.n_qpe)),
    ("Circuit generation (s)", lambda r: f"{r.circuit_generation_seconds:.3f}"),
    ("Simulation (s)", lambda r: f"{r.simulation_seconds:.3f}"),
    ("Error", lambda r: f"{r.l2_error:.3e}"),
)


def format_table(reports: list[SolveReport]) -> str:
    """Rows per quantity, one column per report."""
    heads = [r.case_name + ("*" if r.preconditioned else "") for r in reports]
    cells = [[fn(r) for r in reports] for _, fn in TABLE_ROWS]
    w0 = max(len(name) for name, _ in TABLE_ROWS)
    widths = [max(len(h), *(len(row[i]) for row in cells)) for i, h in enumerate(heads)]
    lines = ["  ".join([" " * w0] + [h.rjust(w) for h, w in zip(heads, widths)])]
    for (name, _), row in zip(TABLE_ROWS, cells):
        lines.append("  ".join([name.ljust(w0)] + [c.rjust(w) for c, w in zip(row, widths)]))
    return "\n".join(lines)


_NUM = {"type": "number"}
_INT = {"type": "integer"}
_NULLNUM = {"type": ["number", "null"]}

SOLVE_REPORT_SCHEMA = {
    "type": "object",
    "required": ["case_name", "matrix_size", "condition_number", "solver", "n_data", "n_qpe",
                 "n_neg_val", "n_total", "l2_error", "preconditioned"],
    "properties": {
        "case_name": {"type": "string"},
        "matrix_size": _INT,
        "condition_number": _NUM,
        "solver": {"enum": ["hhl", "classical"]},
        "n_data": _INT, "n_qpe": _INT, "n_neg_val": _INT, "n_total": _INT, "n_qubits": _INT,
        "circuit_generation_seconds": {"type": "number", "minimum": 0},
        "simulation_seconds": {"type": "number", "minimum": 0},
        "l2_error": {"type": "number", "minimum": 0},
        "preconditioned": {"type": "boolean"},
        "original_condition_number": _NULLNUM,
        "success_probability": _NULLNUM,
        "gate_count": {"type": ["integer", "null"]},
        "fusion": {"type": ["object", "null"]},
        "iteration": {"type": ["integer", "null"]},
        "step_kind": {"type": "string"},
        "extra": {"type": "object"},
    },
}

FUSION_REPORT_SCHEMA = {
    "type": "object",
    "required": ["gates_before", "gates_after", "depth_before", "depth_after",
                 "fusions_by_strategy", "barriers", "reduction"],
    "properties": {
        "gates_before": _INT, "gates_after": _INT, "depth_before": _INT, "depth_after": _INT,
        "fusions_by_strategy": {"type": "object", "additionalProperties": _INT},
        "barriers": _INT, "reduction": _NUM,
    },
}

_PLAN = {
    "type": "object",
    "required": ["n_data", "n_qpe", "n_neg_val", "n_total", "n_ancilla", "evolution_time",
                 "eigen_scale", "c_const", "kappa"],
}

SCHEMAS = {
    "solve-linear": {
        "type": "object", "required": ["command", "report", "x"],
        "properties": {"command": {"const": "solve-linear"}, "report": SOLVE_REPORT_SCHEMA,
                       "x": {"type": "array"}, "x_classical": {"type": "array"}},
    },
    "powerflow": {
        "type": "object",
        "required": ["command", "case", "solver", "variant", "converged", "iterations",
                     "mismatch_norm", "steps", "vm", "va_deg"],
        "properties": {
            "command": {"const": "powerflow"}, "case": {"type": "string"},
            "solver": {"enum": ["hhl", "classical"]},
            "variant": {"enum": ["newton", "fast_decoupled"]},
            "converged": {"type": "boolean"}, "iterations": _INT, "mismatch_norm": _NUM,
            "steps": {"type": "array", "items": SOLVE_REPORT_SCHEMA},
            "vm": {"type": "array", "items": _NUM}, "va_deg": {"type": "array", "items": _NUM},
        },
    },
    "estimate": {
        "type": "object", "required": ["command", "condition_number", "plan"],
        "properties": {"command": {"const": "estimate"}, "condition_number": _NUM,
                       "plan": _PLAN, "table1": {"type": ["object", "null"]}},
    },
    "fuse-stats": {
        "type": "object", "required": ["command", "fusion", "equivalent"],
        "properties": {"command": {"const": "fuse-stats"}, "fusion": FUSION_REPORT_SCHEMA,
                       "equivalent": {"type": ["boolean", "null"]}},
    },
    "export-step": {
        "type": "object", "required": ["command", "matrix_file", "rhs_file", "size"],
        "properties": {"command": {"const": "export-step"}, "size": _INT,
                       "matrix_file": {"type": "string"}, "rhs_file": {"type": "string"}},
    },
}
