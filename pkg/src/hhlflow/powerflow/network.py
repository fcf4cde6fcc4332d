"""Admittance matrix, mismatch, Jacobian and fast-decoupled matrices.

Everything is dense: the bundled networks have at most a few dozen buses.
Unknown ordering is fixed throughout: angles of all non-slack buses (PV and
PQ, in bus-table order), then magnitudes of PQ buses.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .case import BR_B, BR_R, BR_X, BS, F_BUS, GS, SHIFT, T_BUS, TAP, VA, PowerFlowCase


class NetworkError(ValueError):
    pass


@dataclass
class PowerFlowState:
    """Bus voltage magnitudes (p.u.) and angles (rad) in bus-table order."""

    vm: np.ndarray
    va: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return self.vm * np.exp(1j * self.va)

    def copy(self) -> "PowerFlowState":
        return PowerFlowState(self.vm.copy(), self.va.copy())


@dataclass
class LinearStep:
    """One linear system handed to a solver, with labels for its unknowns."""

    matrix: np.ndarray
    rhs: np.ndarray
    variable_labels: list[str] = field(default_factory=list)
    kind: str = ""

    def __post_init__(self):
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n):
            raise NetworkError(f"step matrix must be square, got {self.matrix.shape}")
        if self.rhs.shape != (n,) or len(self.variable_labels) != n:
            raise NetworkError("step matrix, rhs and labels must agree in length")

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def flat_start(case: PowerFlowCase) -> PowerFlowState:
    """|V| = 1 and angle 0, generator setpoints on regulated buses, slack angle from the case."""
    va = np.zeros(case.n_bus)
    va[case.ref] = np.deg2rad(case.bus[case.ref, VA])
    return PowerFlowState(case.voltage_setpoints(), va)


def _branch_admittances(branch: np.ndarray):
    r, x, b = branch[:, BR_R], branch[:, BR_X], branch[:, BR_B]
    zero = (r == 0) & (x == 0)
    if np.any(zero):
        raise NetworkError(f"branch(es) {np.flatnonzero(zero).tolist()} have r = x = 0")
    ys = 1.0 / (r + 1j * x)
    tap = np.where(branch[:, TAP] == 0, 1.0, branch[:, TAP])
    tap = tap * np.exp(1j * np.deg2rad(branch[:, SHIFT]))
    ytt = ys + 0.5j * b
    yff = ytt / (tap * np.conj(tap))
    yft = -ys / np.conj(tap)
    ytf = -ys / tap
    return yff, yft, ytf, ytt


def build_ybus(case: PowerFlowCase, bus=None, branch=None) -> np.ndarray:
    """Dense bus admittance matrix (p.u.) for the in-service branches.

    Series admittance ``1/(r+jx)``, half the line charging at each end, an
    off-nominal tap ``t e^{j shift}`` on the from side, bus shunts on the
    diagonal.  ``bus``/``branch`` replace the case tables when given.
    """
    bus = case.bus if bus is None else bus
    branch = case.online_branch if branch is None else branch
    n = case.n_bus
    y = np.zeros((n, n), dtype=complex)
    if len(branch):
        f = case.bus_index(branch[:, F_BUS])
        t = case.bus_index(branch[:, T_BUS])
        yff, yft, ytf, ytt = _branch_admittances(branch)
        np.add.at(y, (f, f), yff)
        np.add.at(y, (f, t), yft)
        np.add.at(y, (t, f), ytf)
        np.add.at(y, (t, t), ytt)
    y[np.diag_indices(n)] += (bus[:, GS] + 1j * bus[:, BS]) / case.base_mva
    return y


def power_injection(ybus: np.ndarray, state: PowerFlowState) -> np.ndarray:
    v = state.v
    return v * np.conj(ybus @ v)


def mismatch(case: PowerFlowCase, state: PowerFlowState, ybus=None) -> np.ndarray:
    """Scheduled minus calculated injections: ``[dP(pv+pq); dQ(pq)]``."""
    ybus = build_ybus(case) if ybus is None else ybus
    ds = case.sbus() - power_injection(ybus, state)
    return np.concatenate([ds.real[case.pvpq], ds.imag[case.pq]])


def _dsbus_dv(ybus: np.ndarray, v: np.ndarray):
    ibus = ybus @ v
    dv = np.diag(v)
    dvn = np.diag(v / np.abs(v))
    ds_dvm = dv @ np.conj(ybus @ dvn) + np.conj(np.diag(ibus)) @ dvn
    ds_dva = 1j * dv @ np.conj(np.diag(ibus) - ybus @ dv)
    return ds_dva, ds_dvm


def variable_labels(case: PowerFlowCase) -> list[str]:
    ids = case.bus_ids
    return ([f"theta_{ids[i]}" for i in case.pvpq] + [f"vm_{ids[i]}" for i in case.pq])


def jacobian(case: PowerFlowCase, state: PowerFlowState, ybus=None) -> LinearStep:
    """Newton step ``J dx = mismatch`` with ``J = d(calculated injections)/d(theta, |V|)``."""
    ybus = build_ybus(case) if ybus is None else ybus
    ds_dva, ds_dvm = _dsbus_dv(ybus, state.v)
    pvpq, pq = case.pvpq, case.pq
    j = np.block([
        [ds_dva.real[np.ix_(pvpq, pvpq)], ds_dvm.real[np.ix_(pvpq, pq)]],
        [ds_dva.imag[np.ix_(pq, pvpq)], ds_dvm.imag[np.ix_(pq, pq)]],
    ])
    return LinearStep(j, mismatch(case, state, ybus), variable_labels(case), kind="newton")


def bprime_matrix(case: PowerFlowCase) -> np.ndarray:
    """Fast-decoupled B' (XB scheme) over the non-slack buses.

    Shunts, line charging, taps and resistance are dropped; phase shifts are kept.
    """
    bus = case.bus.copy()
    bus[:, BS] = 0
    br = case.online_branch.copy()
    br[:, BR_B] = 0
    br[:, TAP] = 1
    br[:, BR_R] = 0
    b = -build_ybus(case, bus, br).imag
    idx = case.pvpq
    return b[np.ix_(idx, idx)]


def bdoubleprime_matrix(case: PowerFlowCase) -> np.ndarray:
    """Fast-decoupled B'' (XB scheme) over the PQ buses; phase shifts dropped."""
    br = case.online_branch.copy()
    br[:, SHIFT] = 0
    b = -build_ybus(case, case.bus, br).imag
    idx = case.pq
    return b[np.ix_(idx, idx)]


def bprime_system(case: PowerFlowCase, state: PowerFlowState, ybus=None) -> LinearStep:
    """``B' d(theta) = dP / |V|`` over the non-slack buses."""
    ybus = build_ybus(case) if ybus is None else ybus
    npvpq = len(case.pvpq)
    rhs = mismatch(case, state, ybus)[:npvpq] / state.vm[case.pvpq]
    labels = [f"theta_{case.bus_ids[i]}" for i in case.pvpq]
    return LinearStep(bprime_matrix(case), rhs, labels, kind="bprime")


def bdoubleprime_system(case: PowerFlowCase, state: PowerFlowState, ybus=None) -> LinearStep:
    """``B'' d|V| = dQ / |V|`` over the PQ buses."""
    ybus = build_ybus(case) if ybus is None else ybus
    npvpq = len(case.pvpq)
    rhs = mismatch(case, state, ybus)[npvpq:] / state.vm[case.pq]
    labels = [f"vm_{case.bus_ids[i]}" for i in case.pq]
    return LinearStep(bdoubleprime_matrix(case), rhs, labels, kind="bdoubleprime")
