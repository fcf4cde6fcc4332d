"""Gate set and gate matrices.

Matrix convention: the local matrix of a k-qubit gate uses ``qubits[0]`` as
the most significant bit of its row/column index, i.e. ``CX(0, 1)`` has the
textbook matrix with the control on ``qubits[0]``.  This is independent of
the statevector ordering, which is little-endian over global qubit indices
(see :mod:`hhlflow.svsim`).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np

UNITARY_ATOL = 1e-10


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    PHASE = "Phase"
    U3 = "U3"
    CX = "CX"
    CZ = "CZ"
    CPHASE = "CPhase"
    SWAP = "SWAP"
    UNITARY = "Unitary"


ONE_QUBIT_KINDS = frozenset({
    GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.S, GateKind.SDG,
    GateKind.T, GateKind.TDG, GateKind.RX, GateKind.RY, GateKind.RZ,
    GateKind.PHASE, GateKind.U3,
})
TWO_QUBIT_KINDS = frozenset({GateKind.CX, GateKind.CZ, GateKind.CPHASE, GateKind.SWAP})

N_PARAMS = {
    GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1, GateKind.PHASE: 1,
    GateKind.U3: 3, GateKind.CPHASE: 1,
}


class GateError(ValueError):
    """Raised for malformed gates or gates that do not fit a circuit."""


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit operation.

    ``matrix`` is only set for :attr:`GateKind.UNITARY`; named kinds derive
    their matrix from ``params`` via :func:`gate_matrix`.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(qubits)) != len(qubits):
            raise GateError(f"{kind.value}: repeated qubit in {qubits}")
        if any(q < 0 for q in qubits):
            raise GateError(f"{kind.value}: negative qubit index in {qubits}")
        if kind is GateKind.UNITARY:
            if self.matrix is None:
                raise GateError("Unitary gate requires a matrix")
            m = np.array(self.matrix, dtype=complex)
            dim = 1 << len(qubits)
            if m.shape != (dim, dim):
                raise GateError(
                    f"Unitary on {len(qubits)} qubits needs a {dim}x{dim} matrix, got {m.shape}")
            if not np.allclose(m @ m.conj().T, np.eye(dim), rtol=0, atol=UNITARY_ATOL):
                raise GateError("Unitary gate matrix is not unitary within 1e-10")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
            if self.params:
                raise GateError("Unitary gate takes no angle parameters")
            return
        if self.matrix is not None:
            raise GateError(f"{kind.value} does not take an explicit matrix")
        arity = 1 if kind in ONE_QUBIT_KINDS else 2
        if len(qubits) != arity:
            raise GateError(f"{kind.value} acts on {arity} qubit(s), got {len(qubits)}")
        if len(self.params) != N_PARAMS.get(kind, 0):
            raise GateError(
                f"{kind.value} takes {N_PARAMS.get(kind, 0)} parameter(s), got {len(self.params)}")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.qubits, self.params) != (other.kind, other.qubits, other.params):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is other.matrix
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.kind, self.qubits, self.params))

    def remap(self, mapping) -> "Gate":
        """Return the same operation acting on ``mapping[q]`` for each qubit."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.params, self.matrix)


# -- factories ---------------------------------------------------------------

def h(q): return Gate(GateKind.H, (q,))
def x(q): return Gate(GateKind.X, (q,))
def y(q): return Gate(GateKind.Y, (q,))
def z(q): return Gate(GateKind.Z, (q,))
def s(q): return Gate(GateKind.S, (q,))
def sdg(q): return Gate(GateKind.SDG, (q,))
def t(q): return Gate(GateKind.T, (q,))
def tdg(q): return Gate(GateKind.TDG, (q,))
def rx(theta, q): return Gate(GateKind.RX, (q,), (theta,))
def ry(theta, q): return Gate(GateKind.RY, (q,), (theta,))
def rz(theta, q): return Gate(GateKind.RZ, (q,), (theta,))
def phase(lam, q): return Gate(GateKind.PHASE, (q,), (lam,))
def u3(theta, phi, lam, q): return Gate(GateKind.U3, (q,), (theta, phi, lam))
def cx(c, tgt): return Gate(GateKind.CX, (c, tgt))
def cz(a, b): return Gate(GateKind.CZ, (a, b))
def cphase(lam, c, tgt): return Gate(GateKind.CPHASE, (c, tgt), (lam,))
def swap(a, b): return Gate(GateKind.SWAP, (a, b))


def unitary(matrix, qubits) -> Gate:
    return Gate(GateKind.UNITARY, tuple(qubits), (), np.asarray(matrix, dtype=complex))


# -- matrices ----------------------------------------------------------------

_R2 = 1 / sqrt(2)
_FIXED = {
    GateKind.H: np.array([[_R2, _R2], [_R2, -_R2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.exp(-1j * np.pi / 4)]], dtype=complex),
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
for _m in _FIXED.values():
    _m.setflags(write=False)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s_ = cos(theta / 2), sin(theta / 2)
    return np.array([
        [c, -np.exp(1j * lam) * s_],
        [np.exp(1j * phi) * s_, np.exp(1j * (phi + lam)) * c],
    ], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense ``2^k x 2^k`` unitary of ``gate`` (``qubits[0]`` is the MSB)."""
    kind = gate.kind
    if kind is GateKind.UNITARY:
        return gate.matrix
    if kind in _FIXED:
        return _FIXED[kind]
    p = gate.params
    if kind is GateKind.RX:
        c, s_ = cos(p[0] / 2), sin(p[0] / 2)
        return np.array([[c, -1j * s_], [-1j * s_, c]], dtype=complex)
    if kind is GateKind.RY:
        c, s_ = cos(p[0] / 2), sin(p[0] / 2)
        return np.array([[c, -s_], [s_, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.diag([np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])])
    if kind is GateKind.PHASE:
        return np.diag([1, np.exp(1j * p[0])]).astype(complex)
    if kind is GateKind.U3:
        return u3_matrix(*p)
    if kind is GateKind.CPHASE:
        return np.diag([1, 1, 1, np.exp(1j * p[0])]).astype(complex)
    raise GateError(f"no matrix for {kind}")  # pragma: no cover
