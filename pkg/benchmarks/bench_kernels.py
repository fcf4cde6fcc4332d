"""Compiled vs numpy simulator kernels, and fused vs unfused HHL simulation.

Usage::

    python3 benchmarks/bench_kernels.py [--qubits 14 18 20] [--repeat 5] [--json out.json]

Prints median wall time per kernel call for each backend, then the time to
simulate the transpiled 14-bus HHL circuit with and without fusion.
"""
from __future__ import annotations

import argparse
import json
import statistics
import time

import numpy as np

from hhlflow import prep
from hhlflow.circuit import gates as G
from hhlflow.circuit import transpile
from hhlflow.fusion import fuse
from hhlflow.hhl import build_hhl_circuit
from hhlflow.powerflow import bprime_system, flat_start, load_bundled
from hhlflow.svsim import apply_gate, backend, from_amplitudes, run


def _median_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times)


def _random_gates(n: int, rng) -> dict:
    u2 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    u3 = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))[0]
    return {
        "h": G.h(n // 2),
        "rz": G.rz(0.3, n - 1),
        "u3": G.u3(0.1, 0.2, 0.3, 1),
        "cx": G.cx(0, n - 1),
        "cphase": G.cphase(0.7, 2, n - 2),
        "unitary2": G.unitary(u2, (1, n - 2)),
        "unitary3": G.unitary(u3, (0, n // 2, n - 1)),
    }


def bench_kernels(qubits, repeat: int, rng) -> list[dict]:
    rows = []
    for n in qubits:
        psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        state = from_amplitudes(psi / np.linalg.norm(psi))
        for name, gate in _random_gates(n, rng).items():
            row = {"qubits": n, "gate": name}
            for b in backend.available():
                kern = backend.get(b)
                row[b] = _median_time(lambda: apply_gate(state, gate, kern), repeat)
            rows.append(row)
    return rows


def bench_fusion(repeat: int) -> dict:
    case = load_bundled("case14")
    step = bprime_system(case, flat_start(case))
    system = prep.prepare(step.matrix, step.rhs, use_preconditioner=False)
    circ, plan = build_hhl_circuit(system, n_qpe=8, inversion="decomposed")
    circ = transpile(circ)
    fused, rep = fuse(circ)
    out = {"qubits": circ.width, "gates_unfused": len(circ), "gates_fused": len(fused)}
    for b in backend.available():
        out[f"{b}_unfused"] = _median_time(lambda: run(circ, kernels=b), repeat)
        out[f"{b}_fused"] = _median_time(lambda: run(fused, kernels=b), repeat)
    return out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[14, 18, 20])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", help="also write results to this file")
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    backends = backend.available()
    kernels = bench_kernels(args.qubits, args.repeat, rng)
    print(f"per-call kernel time (ms), backends: {', '.join(backends)}")
    print(f"{'n':>3} {'gate':>9} " + " ".join(f"{b:>10}" for b in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for r in kernels:
        line = f"{r['qubits']:>3} {r['gate']:>9} " + " ".join(f"{1e3 * r[b]:>10.3f}" for b in backends)
        if "cython" in r and "python" in r:
            line += f" {r['python'] / r['cython']:>9.2f}x"
        print(line)

    fusion = bench_fusion(args.repeat)
    print(f"\ntranspiled 14-bus HHL circuit, {fusion['qubits']} qubits: "
          f"{fusion['gates_unfused']} gates -> {fusion['gates_fused']} fused")
    for b in backends:
        u, f = fusion[f"{b}_unfused"], fusion[f"{b}_fused"]
        print(f"  {b:>7}: unfused {u:.3f}s  fused {f:.3f}s  ({u / f:.2f}x)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"kernels": kernels, "fusion": fusion}, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
