"""HHL circuit construction.

Qubit layout of every circuit built here::

    data    0 .. n_data-1                    (bit q of the data index on qubit q)
    phase   n_data .. n_data+n_phase-1       (bit j of the phase reading on qubit n_data+j)
    ancilla n_data+n_phase                   (the inversion qubit, last)

The phase register holds ``m``, a fixed-point reading of ``lambda *
phase_per_unit`` in units of ``1/N`` with ``N = 2^n_phase``.  When the plan
has a sign qubit the top bit is read as two's complement.
"""
from __future__ import annotations

import math

import numpy as np

from ..circuit import Circuit, multiplexed_rotation
from ..circuit import gates as G
from .resources import ResourceError, ResourcePlan, plan_for_matrix

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10


class SynthesisError(ValueError):
    pass


def data_qubits(plan: ResourcePlan) -> list[int]:
    return list(range(plan.n_data))


def phase_qubits(plan: ResourcePlan) -> list[int]:
    return list(range(plan.n_data, plan.n_data + plan.n_phase))


def ancilla_qubit(plan: ResourcePlan) -> int:
    return plan.n_data + plan.n_phase


def fixed_point_plan(n_data: int, n_qpe: int, n_neg_val: int = 0) -> ResourcePlan:
    """Plan on which an integer eigenvalue ``m`` is read as phase ``m / N`` exactly."""
    grid = 1 << (n_qpe + n_neg_val)
    return ResourcePlan(
        n_data=n_data, n_qpe=n_qpe, n_neg_val=n_neg_val, n_total=n_data + n_qpe + n_neg_val,
        evolution_time=2 * math.pi, eigen_scale=1.0 / grid, c_const=1.0 / grid,
        kappa=float("nan"), lambda_min_abs=1.0, lambda_max_abs=float("nan"), lambda_min_grid=1,
    )


def signed_reading(m: int, plan: ResourcePlan) -> int:
    """Integer eigenvalue estimate for phase register value ``m``."""
    grid = 1 << plan.n_phase
    if plan.n_neg_val and m >= grid // 2:
        return m - grid
    return m


# ---------------------------------------------------------------- state prep

def _prep_gates(b: np.ndarray, qubits: list[int]) -> list:
    n = len(qubits)
    real = not np.iscomplexobj(b) or np.allclose(b.imag, 0, atol=1e-15)
    amps = b.real if real else np.abs(b)
    gates = []
    # magnitudes top-down: at qubit t the controls are the qubits above it
    for t in reversed(range(n)):
        blocks = amps.reshape(-1, 2, 1 << t)  # [prefix, bit t, lower bits]
        if t == 0 and real:
            a0, a1 = blocks[:, 0, 0], blocks[:, 1, 0]
        else:
            a0 = np.linalg.norm(blocks[:, 0, :], axis=1)
            a1 = np.linalg.norm(blocks[:, 1, :], axis=1)
        angles = 2 * np.arctan2(a1, a0)
        gates += multiplexed_rotation("y", angles, qubits[t + 1:], qubits[t])
    if real:
        return gates
    # relative phases bottom-up, each level leaves the pair mean for the next
    phi = np.angle(b)
    for t in range(n):
        pairs = phi.reshape(-1, 2)
        gates += multiplexed_rotation("z", pairs[:, 1] - pairs[:, 0], qubits[t + 1:], qubits[t])
        phi = pairs.mean(axis=1)
    return gates


def build_state_prep(b, n_qubits: int | None = None) -> Circuit:
    """Circuit taking ``|0..0>`` to ``sum_i b_i |i>`` up to global phase.

    Uniformly controlled RY rotations set the magnitudes one qubit at a time
    from the top; signed real vectors get their signs from the last level
    (``atan2`` of the signed pair), complex vectors get an extra cascade of
    uniformly controlled RZ rotations.
    """
    b = np.asarray(b)
    if b.ndim != 1 or len(b) < 1 or len(b) & (len(b) - 1):
        raise SynthesisError(f"state length must be a power of two, got {b.shape}")
    if abs(np.linalg.norm(b) - 1) > NORM_TOL:
        raise SynthesisError(f"state is not normalized (norm {np.linalg.norm(b):.12g})")
    n = len(b).bit_length() - 1
    width = n if n_qubits is None else n_qubits
    return Circuit(width, _prep_gates(b, list(range(n))), name="state_prep")


# ---------------------------------------------------------------------- QPE

def _check_hermitian(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SynthesisError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.conj().T, rtol=0, atol=HERMITIAN_TOL):
        raise SynthesisError("matrix is not Hermitian")


def controlled_powers(matrix, plan: ResourcePlan) -> list[np.ndarray]:
    """``U^(2^j)`` for each phase bit, ``U = exp(2 pi i A phase_per_unit)``.

    Phases are reduced mod 1 before exponentiating so large powers stay exact.
    """
    w, v = np.linalg.eigh(np.asarray(matrix))
    base = w * plan.phase_per_unit
    out = []
    for j in range(plan.n_phase):
        turns = np.mod(base * (1 << j), 1.0)
        out.append((v * np.exp(2j * np.pi * turns)) @ v.conj().T)
    return out


def _controlled(u: np.ndarray) -> np.ndarray:
    d = len(u)
    m = np.eye(2 * d, dtype=complex)
    m[d:, d:] = u
    return m


def qft_gates(qubits, inverse: bool = False) -> list:
    """Fourier transform ``|m> -> N^-1/2 sum_k e^{2 pi i m k / N} |k>``, bit j on ``qubits[j]``."""
    q = list(qubits)
    n = len(q)
    gates = []
    for j in reversed(range(n)):
        gates.append(G.h(q[j]))
        for k in reversed(range(j)):
            gates.append(G.cphase(math.pi / (1 << (j - k)), q[j], q[k]))
    for i in range(n // 2):
        gates.append(G.swap(q[i], q[n - 1 - i]))
    if not inverse:
        return gates
    out = []
    for g in reversed(gates):
        out.append(G.cphase(-g.params[0], *g.qubits) if g.kind is G.GateKind.CPHASE else g)
    return out


def build_qpe(matrix, plan: ResourcePlan, width: int | None = None) -> Circuit:
    """Phase estimation of ``exp(2 pi i A phase_per_unit)`` into the phase register.

    Each controlled power is one dense gate on ``(phase_j, data_{n-1}, ..,
    data_0)``; the data qubits are listed high bit first so that the matrix
    index equals the data index.
    """
    a = np.asarray(matrix)
    _check_hermitian(a)
    if a.shape[0] != 1 << plan.n_data:
        raise SynthesisError(f"matrix dimension {a.shape[0]} does not match n_data={plan.n_data}")
    data = data_qubits(plan)
    phase = phase_qubits(plan)
    width = plan.n_qubits if width is None else width
    circ = Circuit(width, name="qpe")
    circ.extend(G.h(p) for p in phase)
    rev = tuple(reversed(data))
    for p, u in zip(phase, controlled_powers(a, plan)):
        circ.append(G.unitary(_controlled(u), (p,) + rev))
    circ.extend(qft_gates(phase, inverse=True))
    return circ


# ---------------------------------------------------------------- inversion

def inversion_angles(plan: ResourcePlan) -> np.ndarray:
    """RY angle on the ancilla for each phase register value.

    The ancilla ends with amplitude ``C / lambda~ = 1 / m_signed`` on ``|1>``;
    the zero reading is left unrotated.
    """
    grid = 1 << plan.n_phase
    c = plan.c_const * grid  # C in units of the phase grid, 1 by construction
    out = np.zeros(grid)
    for m in range(1, grid):
        s = signed_reading(m, plan)
        out[m] = 2 * math.asin(max(-1.0, min(1.0, c / s)))
    return out


def inversion_gate_dense(plan: ResourcePlan):
    """Uniformly controlled RY as one dense gate on ``(ancilla, phase high..low)``."""
    angles = inversion_angles(plan)
    grid = len(angles)
    cos, sin = np.cos(angles / 2), np.sin(angles / 2)
    m = np.zeros((2 * grid, 2 * grid))
    idx = np.arange(grid)
    m[idx, idx] = cos
    m[idx, grid + idx] = -sin
    m[grid + idx, idx] = sin
    m[grid + idx, grid + idx] = cos
    return G.unitary(m, (ancilla_qubit(plan),) + tuple(reversed(phase_qubits(plan))))


def inversion_gates(plan: ResourcePlan, method: str = "dense") -> list:
    if method == "dense":
        return [inversion_gate_dense(plan)]
    if method == "decomposed":
        return multiplexed_rotation("y", inversion_angles(plan), phase_qubits(plan),
                                    ancilla_qubit(plan))
    raise SynthesisError(f"unknown inversion method {method!r}")


# --------------------------------------------------------------------- HHL

def build_hhl_circuit(system, n_qpe: int | None = None, inversion: str = "dense",
                      plan: ResourcePlan | None = None) -> tuple[Circuit, ResourcePlan]:
    """State prep, QPE, eigenvalue inversion and uncomputation for ``A x = b``.

    ``system`` is a :class:`~hhlflow.prep.PreparedSystem` (or anything with
    ``matrix`` and ``b_normalized``).  After the circuit, the branch with the
    ancilla at 1 and the phase register at 0 holds ``A^-1 |b>`` scaled by the
    inversion constant.
    """
    a = np.asarray(system.matrix)
    b = np.asarray(system.b_normalized)
    _check_hermitian(a)
    if plan is None:
        try:
            plan = plan_for_matrix(a, n_qpe=n_qpe)
        except ResourceError as exc:
            raise SynthesisError(str(exc)) from exc
    width = plan.n_qubits
    prep = build_state_prep(b, n_qubits=width)
    qpe = build_qpe(a, plan, width)
    circ = Circuit(width, name="hhl", tags={"n_data": plan.n_data, "n_phase": plan.n_phase})
    circ.extend(prep.gates)
    circ.extend(qpe.gates)
    circ.extend(inversion_gates(plan, inversion))
    circ.extend(qpe.inverse().gates)
    return circ, plan
