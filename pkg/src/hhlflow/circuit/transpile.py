"""Lowering to the basis {1q named gates, U3, CX}.

Dense k-qubit unitaries are split with the cosine-sine decomposition into
two multiplexed unitaries around a multiplexed RY.  Multiplexed unitaries are
demultiplexed into two smaller unitaries around a multiplexed RZ, and every
multiplexed rotation is lowered into plain rotations and CX.  Recursion stops
at one qubit, where a ZYZ (U3) factorisation is used.  Global phase is
dropped at every step.
"""
from __future__ import annotations

from math import atan2

import numpy as np
from scipy.linalg import cossin, schur

from . import gates as G
from .core import Circuit
from .gates import Gate, GateError, GateKind

ANGLE_EPS = 1e-14
BASIS_KINDS = frozenset(G.ONE_QUBIT_KINDS | {GateKind.CX})


def u3_params(m: np.ndarray) -> tuple[float, float, float]:
    """(theta, phi, lam) with ``m == e^{i a} U3(theta, phi, lam)`` for some phase ``a``."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    v = m / np.sqrt(det)
    a, b = v[0, 0], v[1, 0]
    theta = 2 * atan2(abs(b), abs(a))
    arg_a = np.angle(a) if abs(a) > 1e-12 else 0.0
    arg_b = np.angle(b) if abs(b) > 1e-12 else 0.0
    return float(theta), float(arg_b - arg_a), float(-arg_a - arg_b)


def _rot(axis: str, angle: float, q: int) -> Gate:
    return G.ry(angle, q) if axis == "y" else G.rz(angle, q)


def multiplexed_rotation(axis: str, angles, controls, target: int) -> list[Gate]:
    """Uniformly controlled rotation lowered to rotations and CX.

    ``angles[c]`` is applied to ``target`` when the control register reads
    ``c``, where bit ``j`` of ``c`` is the value of ``controls[j]``.  The
    recursion peels off the last control: R(a) CX R(b) CX realises R(a+b)
    or R(a-b) depending on that control, since X R(b) X = R(-b) for RY/RZ.
    """
    angles = np.asarray(angles, dtype=float)
    controls = list(controls)
    if len(angles) != 1 << len(controls):
        raise ValueError("need 2^len(controls) angles")
    if np.all(np.abs(angles - angles[0]) < ANGLE_EPS):
        if abs(angles[0]) < ANGLE_EPS:
            return []
        return [_rot(axis, float(angles[0]), target)]
    last = controls[-1]
    half = len(angles) // 2
    a0, a1 = angles[:half], angles[half:]
    rest = controls[:-1]
    return (multiplexed_rotation(axis, (a0 + a1) / 2, rest, target)
            + [G.cx(last, target)]
            + multiplexed_rotation(axis, (a0 - a1) / 2, rest, target)
            + [G.cx(last, target)])


def _demultiplex(u0: np.ndarray, u1: np.ndarray):
    """Return (V, d, W) with u0 = V diag(d) W and u1 = V diag(d)^* W."""
    t, v = schur(u0 @ u1.conj().T, output="complex")
    d = np.sqrt(np.diag(t))
    w = d[:, None] * (v.conj().T @ u1)
    return v, d, w


def decompose_unitary(matrix: np.ndarray, qubits) -> list[Gate]:
    """Basis-gate sequence equal to the dense ``matrix`` on ``qubits`` up to phase."""
    qubits = tuple(qubits)
    k = len(qubits)
    if k == 1:
        th, ph, la = u3_params(matrix)
        return [G.u3(th, ph, la, qubits[0])]
    top, lower = qubits[0], qubits[1:]
    half = 1 << (k - 1)
    (l0, l1), theta, (r0, r1) = cossin(matrix, p=half, q=half, separate=True)
    # bit j of the multiplexor index is qubit lower[-1 - j]
    mux_controls = list(reversed(lower))
    return (_decompose_multiplexor(r0, r1, top, lower, mux_controls)
            + multiplexed_rotation("y", 2 * theta, mux_controls, top)
            + _decompose_multiplexor(l0, l1, top, lower, mux_controls))


def _decompose_multiplexor(u0, u1, select, lower, mux_controls) -> list[Gate]:
    v, d, w = _demultiplex(u0, u1)
    return (decompose_unitary(w, lower)
            + multiplexed_rotation("z", -2 * np.angle(d), mux_controls, select)
            + decompose_unitary(v, lower))


def lower_gate(gate: Gate) -> list[Gate]:
    k = gate.kind
    if k in BASIS_KINDS:
        return [gate]
    q = gate.qubits
    if k is GateKind.CZ:
        return [G.h(q[1]), G.cx(q[0], q[1]), G.h(q[1])]
    if k is GateKind.CPHASE:
        lam = gate.params[0]
        return [G.phase(lam / 2, q[0]), G.cx(q[0], q[1]), G.phase(-lam / 2, q[1]),
                G.cx(q[0], q[1]), G.phase(lam / 2, q[1])]
    if k is GateKind.SWAP:
        return [G.cx(q[0], q[1]), G.cx(q[1], q[0]), G.cx(q[0], q[1])]
    if k is GateKind.UNITARY:
        m = gate.matrix
        if not np.allclose(m @ m.conj().T, np.eye(len(m)), atol=1e-10):
            raise GateError("cannot transpile a non-unitary matrix gate")
        return decompose_unitary(np.array(m), q)
    raise GateError(f"no lowering for {k}")  # pragma: no cover


def transpile(circuit: Circuit) -> Circuit:
    """Rewrite ``circuit`` into 1q named/U3 gates and CX, preserving it up to phase."""
    out = Circuit(circuit.width, name=circuit.name, tags={**circuit.tags, "transpiled": True})
    for g in circuit.gates:
        out.extend(lower_gate(g))
    return out
