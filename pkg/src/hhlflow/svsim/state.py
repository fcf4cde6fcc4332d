"""Dense statevector engine.

Index convention: amplitude index ``i`` has bit ``q`` equal to the value of
qubit ``q`` (little-endian).  Bitstrings returned by :func:`probabilities`
and :func:`sample` list qubit values in the order the qubits were requested,
so ``s[j]`` is the value of ``qubits[j]``; for full-register results that
means ``s[0]`` is qubit 0.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..circuit import Circuit, Gate, GateKind, gate_matrix
from . import backend

MAX_QUBITS = 26
_T = np.exp(1j * np.pi / 4)


class SimulationError(ValueError):
    pass


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n_qubits,):
            raise SimulationError(
                f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes, got {self.amps.shape}")

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())


@dataclass
class MeasurementResult:
    counts: dict[str, int]
    shots: int
    seed: int | None = field(default=None)


def init_state(n_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if not 1 <= n_qubits <= max_qubits:
        raise SimulationError(f"n_qubits must be in [1, {max_qubits}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def from_amplitudes(amps) -> StateVector:
    amps = np.asarray(amps, dtype=np.complex128)
    n = amps.size.bit_length() - 1
    if amps.size != 1 << n:
        raise SimulationError("amplitude count must be a power of two")
    return StateVector(n, amps.copy())


_DIAG = {
    GateKind.Z: (1, -1), GateKind.S: (1, 1j), GateKind.SDG: (1, -1j),
    GateKind.T: (1, _T), GateKind.TDG: (1, np.conj(_T)),
}


def apply_gate(state: StateVector, gate: Gate, kernels=None) -> StateVector:
    """Apply ``gate`` to ``state`` in place and return it.

    Named gates go to specialised kernels; ``Unitary`` gates go to the dense
    1q/2q/k-qubit kernels.  ``kernels`` selects a backend module (default:
    compiled core when available).
    """
    kern = kernels if kernels is not None and not isinstance(kernels, str) else backend.get(kernels)
    if any(q >= state.n_qubits for q in gate.qubits):
        raise SimulationError(
            f"{gate.kind.value} on {gate.qubits} out of range for {state.n_qubits} qubits")
    psi, q, k = state.amps, gate.qubits, gate.kind
    if k is GateKind.H:
        kern.h(psi, q[0])
    elif k is GateKind.X:
        kern.x(psi, q[0])
    elif k is GateKind.Y:
        kern.y(psi, q[0])
    elif k in _DIAG:
        d0, d1 = _DIAG[k]
        kern.diag1(psi, q[0], d0, d1)
    elif k is GateKind.RZ:
        th = gate.params[0]
        kern.diag1(psi, q[0], np.exp(-0.5j * th), np.exp(0.5j * th))
    elif k is GateKind.PHASE:
        kern.diag1(psi, q[0], 1, np.exp(1j * gate.params[0]))
    elif k is GateKind.CX:
        kern.cx(psi, q[0], q[1])
    elif k is GateKind.CZ:
        kern.cphase(psi, q[0], q[1], -1)
    elif k is GateKind.CPHASE:
        kern.cphase(psi, q[0], q[1], np.exp(1j * gate.params[0]))
    elif k is GateKind.SWAP:
        kern.swap(psi, q[0], q[1])
    elif len(q) == 1:
        kern.mat1(psi, q[0], gate_matrix(gate))
    elif len(q) == 2:
        kern.mat2(psi, q[0], q[1], gate_matrix(gate))
    else:
        kern.matk(psi, list(q), gate_matrix(gate))
    return state


def apply_dense(state: StateVector, gate: Gate, kernels=None) -> StateVector:
    """Apply ``gate`` through the generic dense kernel regardless of kind."""
    kern = backend.get(kernels) if kernels is None or isinstance(kernels, str) else kernels
    m = gate_matrix(gate)
    if gate.n_qubits == 1:
        kern.mat1(state.amps, gate.qubits[0], m)
    elif gate.n_qubits == 2:
        kern.mat2(state.amps, gate.qubits[0], gate.qubits[1], m)
    else:
        kern.matk(state.amps, list(gate.qubits), m)
    return state


def run(circuit: Circuit, initial: StateVector | None = None, kernels=None,
        max_qubits: int = MAX_QUBITS) -> StateVector:
    """Execute ``circuit`` from |0...0> (or a copy of ``initial``)."""
    if initial is None:
        state = init_state(circuit.width, max_qubits)
    else:
        if initial.n_qubits != circuit.width:
            raise SimulationError("initial state width does not match circuit")
        state = initial.copy()
    kern = backend.get(kernels) if kernels is None or isinstance(kernels, str) else kernels
    for g in circuit.gates:
        apply_gate(state, g, kern)
    return state


def _check_qubits(state, qubits):
    qubits = list(qubits)
    if not qubits:
        raise SimulationError("qubit subset must be nonempty")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < state.n_qubits for q in qubits):
        raise SimulationError(f"invalid qubit subset {qubits} for {state.n_qubits} qubits")
    return qubits


def marginal(state: StateVector, qubits) -> np.ndarray:
    """Marginal distribution over ``qubits``; entry ``j`` has bit ``i`` = value of ``qubits[i]``."""
    qubits = _check_qubits(state, qubits)
    n = state.n_qubits
    p = (state.amps.real ** 2 + state.amps.imag ** 2).reshape((2,) * n)
    # axis n-1-q holds qubit q; keep requested axes, order them last-qubit first
    keep = [n - 1 - q for q in reversed(qubits)]
    drop = tuple(a for a in range(n) if a not in keep)
    summed = p.sum(axis=drop) if drop else p
    remaining = sorted(keep)
    order = [remaining.index(a) for a in keep]
    return np.transpose(summed, order).reshape(-1)


def _bitstring(j: int, width: int) -> str:
    return "".join("1" if (j >> i) & 1 else "0" for i in range(width))


def probabilities(state: StateVector, qubits) -> dict[str, float]:
    qubits = _check_qubits(state, qubits)
    m = marginal(state, qubits)
    return {_bitstring(j, len(qubits)): float(v) for j, v in enumerate(m) if v > 0}


def postselect_many(state: StateVector, outcomes: dict[int, int],
                    min_probability: float = 1e-12) -> tuple[StateVector, float]:
    """Project onto ``qubit == bit`` for every item of ``outcomes`` and renormalise."""
    qubits = _check_qubits(state, outcomes)
    idx = np.arange(state.amps.size)
    keep = np.ones(idx.size, dtype=bool)
    for q in qubits:
        keep &= ((idx >> q) & 1) == int(outcomes[q])
    amps = np.where(keep, state.amps, 0)
    prob = float(np.vdot(amps, amps).real)
    if prob <= min_probability:
        raise SimulationError(f"postselection outcome {outcomes} has probability {prob:.3g}")
    return StateVector(state.n_qubits, amps / np.sqrt(prob)), prob


def postselect(state: StateVector, qubit: int, outcome: int) -> tuple[StateVector, float]:
    return postselect_many(state, {qubit: outcome})


def sample(state: StateVector, shots: int, seed: int | None = None) -> MeasurementResult:
    """Draw ``shots`` full-register samples; identical ``seed`` gives identical counts."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    p = state.amps.real ** 2 + state.amps.imag ** 2
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    counts = {_bitstring(int(j), state.n_qubits): int(c) for j, c in enumerate(draws) if c}
    return MeasurementResult(counts, shots, seed)


# -- binary dump: uint64 LE amplitude count, then interleaved float64 LE re/im --

def dump_state(state: StateVector, path) -> None:
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", state.amps.size))
        fh.write(state.amps.astype("<c16").tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        (count,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(16 * count), dtype="<c16")
    if data.size != count:
        raise SimulationError("truncated statevector dump")
    return from_amplitudes(data)
