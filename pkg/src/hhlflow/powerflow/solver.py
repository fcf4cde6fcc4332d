"""Newton-Raphson and fast-decoupled power flow with pluggable linear solvers."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .. import prep
from ..hhl import solve as hhl_solve
from ..report import SolveReport
from .case import PowerFlowCase
from .network import (LinearStep, PowerFlowState, bdoubleprime_system, bprime_system,
                      build_ybus, flat_start, jacobian, mismatch)

log = logging.getLogger(__name__)

SOLVERS = ("classical", "hhl")
VARIANTS = ("newton", "fast_decoupled")


class PowerFlowError(RuntimeError):
    """Non-convergence; carries the last state and mismatch norm."""

    def __init__(self, message, state=None, mismatch_norm=None, steps=None):
        super().__init__(message)
        self.state = state
        self.mismatch_norm = mismatch_norm
        self.steps = steps or []


@dataclass
class HHLOptions:
    n_qpe: int | None = None
    use_preconditioner: bool | None = None
    kappa_threshold: float = prep.DEFAULT_KAPPA_THRESHOLD
    fuse: bool = False
    kernels: str | None = None


@dataclass
class PowerFlowResult:
    state: PowerFlowState
    converged: bool
    iterations: int
    mismatch_norm: float
    steps: list[SolveReport] = field(default_factory=list)
    linear_steps: list[LinearStep] = field(default_factory=list)


def solve_step(step: LinearStep, solver: str = "classical", case_name: str = "",
               options: HHLOptions | None = None, iteration: int | None = None
               ) -> tuple[np.ndarray, SolveReport]:
    """Solve one linear step, reporting error against a dense direct solve."""
    x_ref = np.linalg.solve(step.matrix, step.rhs)
    kappa = float(np.linalg.cond(step.matrix))
    if solver == "classical":
        return x_ref, SolveReport(case_name, step.size, kappa, solver="classical",
                                  iteration=iteration, step_kind=step.kind)
    if solver != "hhl":
        raise ValueError(f"unknown solver {solver!r}")
    opts = options or HHLOptions()
    system = prep.prepare(step.matrix, step.rhs, use_preconditioner=opts.use_preconditioner,
                          kappa_threshold=opts.kappa_threshold)
    sol = hhl_solve(system, n_qpe=opts.n_qpe, fuse=opts.fuse, kernels=opts.kernels)
    plan = sol.resource_plan
    report = SolveReport(
        case_name, step.size, system.condition_number, solver="hhl",
        n_data=plan.n_data, n_qpe=plan.n_qpe, n_neg_val=plan.n_neg_val, n_total=plan.n_total,
        n_qubits=plan.n_qubits,
        circuit_generation_seconds=sol.circuit_generation_seconds,
        simulation_seconds=sol.simulation_seconds,
        l2_error=float(np.linalg.norm(sol.x - x_ref)),
        preconditioned=system.preconditioned,
        original_condition_number=system.original_condition_number,
        success_probability=sol.success_probability, gate_count=sol.gate_count,
        fusion=sol.fusion.to_dict() if sol.fusion else None,
        iteration=iteration, step_kind=step.kind, extra={"table1": plan.table1()},
    )
    return sol.x, report


def solve_powerflow(case: PowerFlowCase, solver: str = "classical", variant: str = "newton",
                    tol: float = 1e-8, max_iter: int = 20, hhl: HHLOptions | None = None,
                    initial: PowerFlowState | None = None) -> PowerFlowResult:
    """Iterate until ``||mismatch||_inf < tol``.

    ``iterations`` counts state updates; a case already balanced at the
    initial state converges with zero.  Raises :class:`PowerFlowError` after
    ``max_iter`` updates without convergence.
    """
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    ybus = build_ybus(case)
    state = flat_start(case) if initial is None else initial.copy()
    pvpq, pq = case.pvpq, case.pq
    npvpq = len(pvpq)
    reports: list[SolveReport] = []
    steps: list[LinearStep] = []

    def norm(s):
        f = mismatch(case, s, ybus)
        return float(np.max(np.abs(f))) if f.size else 0.0

    err = norm(state)
    it = 0
    t0 = time.perf_counter()
    while err >= tol and it < max_iter:
        it += 1
        if variant == "newton":
            step = jacobian(case, state, ybus)
            dx, rep = solve_step(step, solver, case.name, hhl, it)
            state.va[pvpq] += dx[:npvpq]
            state.vm[pq] += dx[npvpq:]
            steps.append(step)
            reports.append(rep)
        else:
            step = bprime_system(case, state, ybus)
            dx, rep = solve_step(step, solver, case.name, hhl, it)
            state.va[pvpq] += dx
            steps.append(step)
            reports.append(rep)
            if len(pq):
                step = bdoubleprime_system(case, state, ybus)
                dx, rep = solve_step(step, solver, case.name, hhl, it)
                state.vm[pq] += dx
                steps.append(step)
                reports.append(rep)
        err = norm(state)
        log.debug("iteration %d: mismatch %.3e", it, err)
    log.info("%s %s/%s: %d iterations, mismatch %.3e, %.2fs", case.name, variant, solver,
             it, err, time.perf_counter() - t0)
    if err >= tol:
        raise PowerFlowError(
            f"{case.name}: no convergence after {it} iterations "
            f"(||mismatch||_inf = {err:.3e}, tol = {tol:g})",
            state=state, mismatch_norm=err, steps=reports)
    return PowerFlowResult(state, True, it, err, reports, steps)
