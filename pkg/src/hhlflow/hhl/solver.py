"""End-to-end HHL solve on the statevector simulator."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .. import prep as _prep
from ..circuit import transpile as _transpile
from ..fusion import FusionReport, fuse as _fuse
from ..svsim import run
from .resources import ResourcePlan
from .synthesis import ancilla_qubit, build_hhl_circuit

log = logging.getLogger(__name__)

LOW_SUCCESS = 1e-6


class HHLError(RuntimeError):
    pass


@dataclass
class HHLSolution:
    x: np.ndarray
    success_probability: float  # P(ancilla = 1)
    postselection_probability: float  # P(ancilla = 1, phase register = 0)
    resource_plan: ResourcePlan
    timings: dict = field(default_factory=dict)
    gate_count: int = 0
    fusion: FusionReport | None = None
    low_success: bool = False

    @property
    def circuit_generation_seconds(self) -> float:
        return self.timings.get("generation", 0.0)

    @property
    def simulation_seconds(self) -> float:
        return self.timings.get("simulation", 0.0)


def solve(system: "_prep.PreparedSystem", n_qpe: int | None = None, fuse: bool = False,
          transpile: bool = False, inversion: str = "dense", kernels=None,
          plan: ResourcePlan | None = None) -> HHLSolution:
    """Solve a prepared system with HHL and undo the conditioning.

    ``transpile`` lowers the circuit to 1q gates and CX first (the setting in
    which fusion matters); ``fuse`` runs the fusion pass before simulation.
    Fusion time is counted as circuit generation.
    """
    t0 = time.perf_counter()
    circ, plan = build_hhl_circuit(system, n_qpe=n_qpe, inversion=inversion, plan=plan)
    if transpile:
        circ = _transpile(circ)
    report = None
    if fuse:
        circ, report = _fuse(circ)
    t1 = time.perf_counter()
    state = run(circ, kernels=kernels)
    t2 = time.perf_counter()

    amps = state.amps
    anc = ancilla_qubit(plan)
    dim = 1 << plan.n_data
    p_anc = float(np.sum(np.abs(amps[1 << anc:]) ** 2))
    branch = amps[(1 << anc):(1 << anc) + dim]
    p_branch = float(np.vdot(branch, branch).real)
    if p_branch <= 1e-15:
        raise HHLError(f"success branch has probability {p_branch:.3g}; "
                       "the phase register cannot resolve the spectrum")
    low = p_anc < LOW_SUCCESS
    if low:
        log.warning("HHL success probability %.3g is very low", p_anc)
    x = _prep.recover_solution(system, branch / np.sqrt(p_branch), p_branch,
                               plan.rotation_constant)
    return HHLSolution(
        x=x, success_probability=p_anc, postselection_probability=p_branch,
        resource_plan=plan, timings={"generation": t1 - t0, "simulation": t2 - t1},
        gate_count=len(circ), fusion=report, low_success=low,
    )


def solve_linear_system(matrix, b, use_preconditioner: bool | None = None,
                        kappa_threshold: float = _prep.DEFAULT_KAPPA_THRESHOLD,
                        **kwargs) -> tuple[HHLSolution, "_prep.PreparedSystem"]:
    """:func:`~hhlflow.prep.prepare` followed by :func:`solve`."""
    system = _prep.prepare(matrix, b, use_preconditioner=use_preconditioner,
                           kappa_threshold=kappa_threshold)
    return solve(system, **kwargs), system
