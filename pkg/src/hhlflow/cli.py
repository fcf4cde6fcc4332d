"""Command-line runner.

Subcommands::

    solve-linear MATRIX RHS   HHL solve of a MatrixMarket system vs a direct solve
    powerflow CASE            power flow with classical or HHL linear steps
    estimate MATRIX           qubit budget for a matrix
    fuse-stats [CIRCUIT]      gate fusion statistics for a circuit file or a generated HHL circuit
    export-step CASE          write a power-flow linear step as MatrixMarket files

``--json`` prints one self-describing JSON record instead of text.  Exit
status is 0 on success, 1 on input or runtime errors, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import __version__, prep
from .circuit import circuit_unitary, equal_up_to_phase, transpile
from .circuit.textio import load as load_circuit
from .circuit.core import MAX_UNITARY_WIDTH
from .fusion import fuse
from .hhl import build_hhl_circuit, estimate_resources, solve
from .hhl.systems import random_hermitian_system
from .mmio import read_matrix, read_vector, write_matrix, write_vector
from .report import SolveReport, format_table, to_jsonable

log = logging.getLogger("hhlflow")

EQUIVALENCE_MAX_WIDTH = 10


class CLIError(Exception):
    pass


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def _add_hhl_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--precondition", dest="precondition", action="store_true", default=None,
                   help="always apply Gauss-Seidel preconditioning")
    g.add_argument("--no-precondition", dest="precondition", action="store_false",
                   help="never precondition")
    p.add_argument("--kappa-threshold", type=_positive_float,
                   default=prep.DEFAULT_KAPPA_THRESHOLD,
                   help="auto-precondition above this condition number (default %(default)s)")
    p.add_argument("--n-qpe", type=_positive_int, default=None,
                   help="phase-register magnitude bits (default: resource formula)")
    p.add_argument("--fuse", action="store_true", help="run gate fusion before simulation")
    p.add_argument("--kernels", choices=("python", "cython"), default=None,
                   help="simulator kernel backend")


def _emit(args, record: dict, text: str) -> None:
    if args.json:
        print(json.dumps(to_jsonable(record), indent=2, sort_keys=True))
    else:
        print(text)


# ------------------------------------------------------------------ commands

def cmd_solve_linear(args) -> int:
    a = read_matrix(args.matrix)
    b = read_vector(args.rhs)
    if b.shape[0] != a.shape[0]:
        raise CLIError(f"matrix is {a.shape[0]}x{a.shape[1]} but rhs has {b.shape[0]} entries")
    if not np.iscomplexobj(a) and not np.iscomplexobj(b):
        a, b = a.astype(float), b.astype(float)
    system = prep.prepare(a, b, use_preconditioner=args.precondition,
                          kappa_threshold=args.kappa_threshold)
    sol = solve(system, n_qpe=args.n_qpe, fuse=args.fuse, kernels=args.kernels)
    x_ref = np.linalg.solve(a, b)
    plan = sol.resource_plan
    extra = {"table1": plan.table1(), "postselection_probability": sol.postselection_probability}
    if args.shots:
        rng = np.random.default_rng(args.seed)
        hits = rng.binomial(args.shots, sol.success_probability)
        extra["sampled_success_probability"] = hits / args.shots
        extra["shots"] = args.shots
    rep = SolveReport(
        args.name or args.matrix, a.shape[0], system.condition_number, solver="hhl",
        n_data=plan.n_data, n_qpe=plan.n_qpe, n_neg_val=plan.n_neg_val, n_total=plan.n_total,
        n_qubits=plan.n_qubits, circuit_generation_seconds=sol.circuit_generation_seconds,
        simulation_seconds=sol.simulation_seconds, l2_error=float(np.linalg.norm(sol.x - x_ref)),
        preconditioned=system.preconditioned,
        original_condition_number=system.original_condition_number,
        success_probability=sol.success_probability, gate_count=sol.gate_count,
        fusion=sol.fusion.to_dict() if sol.fusion else None, extra=extra,
    )
    record = {"command": "solve-linear", "report": rep.to_dict(), "x": _vec(sol.x),
              "x_classical": _vec(x_ref)}
    text = format_table([rep]) + f"\nsuccess probability  {sol.success_probability:.4e}"
    if sol.low_success:
        text += "  (very low)"
    _emit(args, record, text)
    return 0


def _vec(x) -> list:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return [{"re": float(v.real), "im": float(v.imag)} for v in x]
    return [float(v) for v in x]


def cmd_powerflow(args) -> int:
    from .powerflow import HHLOptions, PowerFlowError, resolve_case, solve_powerflow

    case = resolve_case(args.case)
    opts = HHLOptions(n_qpe=args.n_qpe, use_preconditioner=args.precondition,
                      kappa_threshold=args.kappa_threshold, fuse=args.fuse,
                      kernels=args.kernels)
    try:
        res = solve_powerflow(case, solver=args.solver, variant=args.variant, tol=args.tol,
                              max_iter=args.max_iter, hhl=opts)
    except PowerFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.steps:
            print(_iteration_table(exc.steps), file=sys.stderr)
        return 1
    st = res.state
    va_deg = np.rad2deg(st.va)
    record = {"command": "powerflow", "case": case.name, "solver": args.solver,
              "variant": args.variant, "converged": res.converged, "iterations": res.iterations,
              "mismatch_norm": res.mismatch_norm, "steps": [r.to_dict() for r in res.steps],
              "vm": st.vm.tolist(), "va_deg": va_deg.tolist()}
    lines = [f"{case.name}: {args.variant}/{args.solver} converged in {res.iterations} "
             f"iteration(s), ||mismatch||_inf = {res.mismatch_norm:.3e}"]
    if res.steps:
        lines += ["", _iteration_table(res.steps)]
    lines += ["", f"{'bus':>5} {'|V| (pu)':>12} {'angle (deg)':>13}"]
    for bid, vm, va in zip(case.bus_ids, st.vm, va_deg):
        lines.append(f"{bid:>5} {vm:>12.6f} {va:>13.6f}")
    _emit(args, record, "\n".join(lines))
    return 0


def _iteration_table(steps: list[SolveReport]) -> str:
    head = f"{'iter':>4} {'step':>13} {'size':>5} {'kappa':>10} {'qubits':>6} {'error':>11}"
    rows = [head]
    for r in steps:
        rows.append(f"{r.iteration or 0:>4} {r.step_kind:>13} {r.matrix_size:>5} "
                    f"{r.condition_number:>10.2f} {r.n_qubits:>6} {r.l2_error:>11.3e}")
    return "\n".join(rows)


def cmd_estimate(args) -> int:
    a = read_matrix(args.matrix)
    kappa = prep.condition_number(a)
    if prep.is_hermitian(a):
        dim = 1 << max(0, (a.shape[0] - 1).bit_length())
        w = np.linalg.eigvalsh(a)
        neg = bool(w.min() < -1e-12 * np.abs(w).max())
    else:
        dim = 2 << max(0, (a.shape[0] - 1).bit_length())
        neg = True  # the block embedding has eigenvalues +-sigma
    plan = estimate_resources(dim, kappa, neg, n_qpe=args.n_qpe)
    record = {"command": "estimate", "condition_number": kappa, "plan": plan.to_dict(),
              "table1": plan.table1() if args.table1_convention else None}
    lines = [f"matrix        {a.shape[0]} x {a.shape[1]}",
             f"kappa         {kappa:.6g}",
             f"n_data        {plan.n_data}",
             f"n_qpe         {plan.n_qpe}",
             f"n_neg_val     {plan.n_neg_val}",
             f"n_total       {plan.n_total}  (+{plan.n_ancilla} inversion ancilla)"]
    if args.table1_convention:
        t = plan.table1()
        lines.append(f"table convention: n_qpe {t['n_qpe']}, n_total {t['n_total']} "
                     "(sign qubit counted in the phase register, ancilla in the total)")
    _emit(args, record, "\n".join(lines))
    return 0


def cmd_fuse_stats(args) -> int:
    if args.circuit:
        circ = load_circuit(args.circuit)
    else:
        if args.matrix:
            a = read_matrix(args.matrix)
            if not args.rhs:
                raise CLIError("--matrix needs --rhs")
            b = read_vector(args.rhs)
        else:
            a, b = random_hermitian_system(args.dim, args.kappa, seed=args.seed, real=True)
        system = prep.prepare(a, b, use_preconditioner=False)
        circ, _ = build_hhl_circuit(system, n_qpe=args.n_qpe, inversion="decomposed")
    if args.transpile:
        circ = transpile(circ)
    fused, rep = fuse(circ)
    equivalent = None
    if circ.width <= min(EQUIVALENCE_MAX_WIDTH, MAX_UNITARY_WIDTH):
        equivalent = equal_up_to_phase(circuit_unitary(circ), circuit_unitary(fused), 1e-8)
    record = {"command": "fuse-stats", "fusion": rep.to_dict(), "equivalent": equivalent,
              "width": circ.width}
    lines = [f"gates   {rep.gates_before} -> {rep.gates_after}  ({100 * rep.reduction:.1f}% fewer)",
             f"depth   {rep.depth_before} -> {rep.depth_after}"]
    lines += [f"  {k:<12} {v}" for k, v in rep.fusions_by_strategy.items()]
    if rep.barriers:
        lines.append(f"barriers ({'>'}2-qubit gates left unfused): {rep.barriers}")
    lines.append("equivalence: " + ("skipped (too wide)" if equivalent is None
                                    else "ok" if equivalent else "FAILED"))
    _emit(args, record, "\n".join(lines))
    return 0 if equivalent is not False else 1


def cmd_export_step(args) -> int:
    from .powerflow import bdoubleprime_system, bprime_system, flat_start, jacobian, resolve_case

    case = resolve_case(args.case)
    state = flat_start(case)
    build = {"bprime": bprime_system, "bdoubleprime": bdoubleprime_system,
             "newton": jacobian}[args.step]
    step = build(case, state)
    write_matrix(args.matrix_out, step.matrix, comment=f"{case.name} {step.kind} at flat start")
    write_vector(args.rhs_out, step.rhs, comment=f"{case.name} {step.kind} rhs")
    record = {"command": "export-step", "size": step.size, "matrix_file": args.matrix_out,
              "rhs_file": args.rhs_out, "labels": step.variable_labels}
    _emit(args, record, f"wrote {step.size}x{step.size} {step.kind} step to "
                        f"{args.matrix_out} and {args.rhs_out}")
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hhlflow", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON record")
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve-linear", parents=[common], help="HHL solve of A x = b")
    s.add_argument("matrix", help="MatrixMarket matrix file")
    s.add_argument("rhs", help="MatrixMarket vector file")
    s.add_argument("--name", default="", help="label for the report")
    s.add_argument("--shots", type=int, default=0,
                   help="also estimate the success probability from this many seeded shots")
    _add_hhl_flags(s)
    s.set_defaults(func=cmd_solve_linear)

    s = sub.add_parser("powerflow", parents=[common], help="AC power flow")
    s.add_argument("case", help="bundled case name (case14, case30) or case file path")
    s.add_argument("--solver", choices=("classical", "hhl"), default="classical")
    s.add_argument("--variant", choices=("newton", "fast_decoupled"), default="newton")
    s.add_argument("--tol", type=_positive_float, default=1e-8)
    s.add_argument("--max-iter", type=_positive_int, default=30)
    _add_hhl_flags(s)
    s.set_defaults(func=cmd_powerflow)

    s = sub.add_parser("estimate", parents=[common], help="qubit budget for a matrix")
    s.add_argument("matrix", help="MatrixMarket matrix file")
    s.add_argument("--n-qpe", type=_positive_int, default=None)
    s.add_argument("--table1-convention", action="store_true",
                   help="also print counts with the sign qubit in the phase register "
                        "and the ancilla in the total")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("fuse-stats", parents=[common], help="gate fusion statistics")
    s.add_argument("circuit", nargs="?", help="circuit text file (default: generated HHL circuit)")
    s.add_argument("--matrix", help="build the HHL circuit for this MatrixMarket system")
    s.add_argument("--rhs")
    s.add_argument("--dim", type=_positive_int, default=2,
                   help="size of the generated random system (default %(default)s)")
    s.add_argument("--kappa", type=_positive_float, default=8.0)
    s.add_argument("--n-qpe", type=_positive_int, default=None)
    s.add_argument("--transpile", action="store_true", help="lower to 1q gates and CX first")
    s.set_defaults(func=cmd_fuse_stats)

    s = sub.add_parser("export-step", parents=[common],
                       help="write a flat-start power-flow linear step")
    s.add_argument("case")
    s.add_argument("--step", choices=("bprime", "bdoubleprime", "newton"), default="bprime")
    s.add_argument("--matrix-out", required=True)
    s.add_argument("--rhs-out", required=True)
    s.set_defaults(func=cmd_export_step)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CLIError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
