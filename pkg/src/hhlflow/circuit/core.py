from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .gates import Gate, GateError, gate_matrix

MAX_UNITARY_WIDTH = 12


@dataclass(eq=False)
class Circuit:
    """Ordered gate list over a fixed number of qubits.

    Gates run left to right.  Gates are immutable, so sharing a circuit
    between threads is safe once it is no longer being appended to.
    """

    width: int
    gates: list[Gate] = field(default_factory=list)
    name: str = ""
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.width < 1:
            raise GateError(f"circuit width must be >= 1, got {self.width}")
        gates, self.gates = list(self.gates), []
        for g in gates:
            self.append(g)

    def append(self, gate: Gate) -> "Circuit":
        bad = [q for q in gate.qubits if q >= self.width]
        if bad:
            raise GateError(
                f"{gate.kind.value} on qubit(s) {bad} does not fit width {self.width}")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def compose(self, other: "Circuit", qubits=None) -> "Circuit":
        """Append ``other``'s gates, optionally remapping its qubit ``i`` to ``qubits[i]``."""
        if qubits is None:
            return self.extend(other.gates)
        return self.extend(g.remap(qubits) for g in other.gates)

    def copy(self) -> "Circuit":
        return Circuit(self.width, list(self.gates), self.name, dict(self.tags))

    def inverse(self) -> "Circuit":
        out = Circuit(self.width, name=f"{self.name}_dg" if self.name else "")
        for g in reversed(self.gates):
            out.append(inverse_gate(g))
        return out

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.width == other.width and self.gates == other.gates

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
        return counts

    def count_by_arity(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for g in self.gates:
            counts[g.n_qubits] = counts.get(g.n_qubits, 0) + 1
        return counts


def append(circuit: Circuit, gate: Gate) -> Circuit:
    return circuit.append(gate)


def inverse_gate(gate: Gate) -> Gate:
    from .gates import GateKind, unitary

    k = gate.kind
    self_inverse = {GateKind.H, GateKind.X, GateKind.Y, GateKind.Z,
                    GateKind.CX, GateKind.CZ, GateKind.SWAP}
    if k in self_inverse:
        return gate
    flip = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
            GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}
    if k in flip:
        return Gate(flip[k], gate.qubits)
    if k in (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE, GateKind.CPHASE):
        return Gate(k, gate.qubits, (-gate.params[0],))
    if k is GateKind.U3:
        theta, phi, lam = gate.params
        return Gate(k, gate.qubits, (-theta, -lam, -phi))
    return unitary(gate.matrix.conj().T, gate.qubits)


def _apply_to_columns(u: np.ndarray, matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    # u: (2,)*n + (cols,), axis n-1-q holds qubit q
    k = len(qubits)
    axes = [n - 1 - q for q in qubits]
    m = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(m, u, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the gate's output axes first; move them back
    return np.moveaxis(out, list(range(k)), axes)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit`` in the little-endian global basis."""
    n = circuit.width
    if n > MAX_UNITARY_WIDTH:
        raise ValueError(f"circuit_unitary limited to width <= {MAX_UNITARY_WIDTH}, got {n}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in circuit.gates:
        u = _apply_to_columns(u, gate_matrix(g), g.qubits, n)
    return u.reshape(dim, dim)


def embed_gate(matrix: np.ndarray, qubits, n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` operator of a gate, built by index arithmetic.

    Kept deliberately separate from :func:`circuit_unitary` and the simulator
    kernels so it can serve as an oracle for both.
    """
    k = len(qubits)
    idx = np.arange(1 << n)
    loc = np.zeros_like(idx)
    mask = 0
    for j, q in enumerate(qubits):
        loc |= ((idx >> q) & 1) << (k - 1 - j)
        mask |= 1 << q
    rest = idx & ~mask
    full = matrix[loc[:, None], loc[None, :]]
    return np.where(rest[:, None] == rest[None, :], full, 0)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    """Operator-norm closeness of ``a`` and ``b`` after removing a global phase."""
    ov = np.vdot(a.ravel(), b.ravel())
    ph = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    diff = b - ph * a
    if diff.ndim == 1:
        return float(np.linalg.norm(diff)) <= atol
    return float(np.linalg.norm(diff, 2)) <= atol
