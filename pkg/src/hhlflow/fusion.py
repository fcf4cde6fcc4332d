"""Gate fusion.

Four rewrite strategies, tried in priority order:

1. two 1q gates on the same qubit -> one 1q gate
2. a 1q gate into the 2q gate that follows it on that qubit
3. a 1q gate into the 2q gate that precedes it on that qubit
4. two 2q gates on the same (unordered) qubit pair -> one 2q gate

Two gates are adjacent when they are neighbours in the per-qubit dependency
order, i.e. no gate between them touches a qubit they share.  Each strategy is
one left-to-right sweep; after any sweep that fused something the pass starts
again from strategy 1, and it stops when a full round fuses nothing.  Gates on
more than two qubits are never fused and block fusion across them.  Fused
gates are emitted as dense ``Unitary`` gates.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import Circuit, Gate, gate_matrix
from .circuit.gates import unitary

STRATEGIES = ("1q+1q", "1q->next2q", "prev2q<-1q", "2q+2q")
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


@dataclass
class FusionReport:
    gates_before: int
    gates_after: int
    depth_before: int
    depth_after: int
    fusions_by_strategy: dict[str, int] = field(
        default_factory=lambda: {s: 0 for s in STRATEGIES})
    barriers: int = 0

    @property
    def reduction(self) -> float:
        return 1 - self.gates_after / self.gates_before if self.gates_before else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reduction"] = self.reduction
        return d


def depth(circuit: Circuit) -> int:
    """Longest chain of gates that are ordered by sharing a qubit."""
    level = [0] * circuit.width
    best = 0
    for g in circuit.gates:
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
        best = max(best, d)
    return best


def _as_pair(m: np.ndarray, gq, pair) -> np.ndarray:
    """Express a gate matrix on qubits ``gq`` in the qubit order ``pair``."""
    if len(gq) == 1:
        return np.kron(m, _I2) if gq[0] == pair[0] else np.kron(_I2, m)
    if tuple(gq) == tuple(pair):
        return m
    return _SWAP @ m @ _SWAP


def _fusable(g: Gate) -> bool:
    return g.n_qubits <= 2


def _sweep(gates: list[Gate], width: int, strategy: int) -> tuple[list[Gate], int]:
    out: list[Gate | None] = []
    last = [-1] * width  # index into ``out`` of the latest gate on each qubit
    fused = 0
    for g in gates:
        k = g.n_qubits
        if strategy == 1 and k == 1:
            p = last[g.qubits[0]]
            if p >= 0 and out[p].n_qubits == 1:
                prev = out[p]
                out[p] = unitary(gate_matrix(g) @ gate_matrix(prev), g.qubits)
                fused += 1
                continue
        elif strategy == 2 and k == 2:
            m, absorbed = gate_matrix(g), False
            for q in g.qubits:
                p = last[q]
                if p >= 0 and out[p].n_qubits == 1:
                    prev = out[p]
                    m = m @ _as_pair(gate_matrix(prev), prev.qubits, g.qubits)
                    out[p] = None
                    fused += 1
                    absorbed = True
            if absorbed:
                g = unitary(m, g.qubits)
        elif strategy == 3 and k == 1:
            p = last[g.qubits[0]]
            if p >= 0 and out[p].n_qubits == 2:
                prev = out[p]
                out[p] = unitary(_as_pair(gate_matrix(g), g.qubits, prev.qubits)
                                 @ gate_matrix(prev), prev.qubits)
                fused += 1
                continue
        elif strategy == 4 and k == 2:
            a, b = g.qubits
            p = last[a]
            if p >= 0 and p == last[b] and out[p].n_qubits == 2:
                prev = out[p]
                out[p] = unitary(_as_pair(gate_matrix(g), g.qubits, prev.qubits)
                                 @ gate_matrix(prev), prev.qubits)
                fused += 1
                continue
        idx = len(out)
        out.append(g)
        # a >2q gate becomes the predecessor on its qubits and matches no strategy
        for q in g.qubits:
            last[q] = idx
    return [g for g in out if g is not None], fused


def fuse(circuit: Circuit) -> tuple[Circuit, FusionReport]:
    """Fuse gates to a fixed point; the result equals ``circuit`` up to global phase."""
    gates = list(circuit.gates)
    report = FusionReport(len(gates), 0, depth(circuit), 0,
                          barriers=sum(1 for g in gates if not _fusable(g)))
    while True:
        for s in (1, 2, 3, 4):
            gates, n = _sweep(gates, circuit.width, s)
            if n:
                report.fusions_by_strategy[STRATEGIES[s - 1]] += n
                break
        else:
            break
    out = Circuit(circuit.width, gates, name=circuit.name, tags={**circuit.tags, "fused": True})
    report.gates_after = len(gates)
    report.depth_after = depth(out)
    return out, report
