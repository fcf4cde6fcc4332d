import numpy as np
import pytest
from hypothesis import given, strategies as st

from hhlflow.powerflow import (PQ, PV, REF, CaseParseError, HHLOptions, NetworkError,
                               PowerFlowCase, PowerFlowError, PowerFlowState, bprime_matrix,
                               bprime_system, build_ybus, flat_start, jacobian, load_bundled,
                               mismatch, parse_case, save_case, load_case, serialize_case,
                               solve_powerflow, solve_step)
from hhlflow.powerflow.case import BR_B, BS, GS, PD, QD, SHIFT, TAP

# published AC solution of the IEEE 14-bus case, three decimals
CASE14_VM = [1.060, 1.045, 1.010, 1.018, 1.020, 1.070, 1.062, 1.090, 1.056, 1.051, 1.057,
             1.055, 1.050, 1.036]
CASE14_VA_DEG = [0.0, -4.983, -12.725, -10.313, -8.774, -14.221, -13.360, -13.360, -14.939,
                 -15.097, -14.791, -15.076, -15.156, -16.034]


def two_bus(x=0.1, r=0.0, pd=0.0, qd=0.0, slack_angle=0.0):
    bus = np.zeros((2, 13))
    bus[:, 0] = [1, 2]
    bus[:, 1] = [REF, PQ]
    bus[:, PD] = [0, pd]
    bus[:, QD] = [0, qd]
    bus[:, 7] = 1.0
    bus[0, 8] = slack_angle
    bus[:, 9] = 100
    bus[:, 11] = 1.1
    bus[:, 12] = 0.9
    gen = np.zeros((1, 21))
    gen[0, [0, 5, 6, 7]] = [1, 1.0, 100, 1]
    branch = np.zeros((1, 13))
    branch[0, [0, 1, 2, 3, 10]] = [1, 2, r, x, 1]
    return PowerFlowCase("two_bus", 100.0, bus, gen, branch)


@pytest.fixture(scope="module", params=["case14", "case30"])
def case(request):
    return load_bundled(request.param)


# ---------------------------------------------------------------- parsing

def test_case14_counts():
    c = load_bundled("case14")
    assert (c.n_bus, c.n_branch, int(np.sum(c.bus_types == REF))) == (14, 20, 1)
    assert len(c.pq) == 9 and len(c.pv) == 4


def test_case30_counts():
    c = load_bundled("case30")
    assert (c.n_bus, c.n_branch, int(np.sum(c.bus_types == REF))) == (30, 41, 1)


def test_missing_block_named():
    text = serialize_case(load_bundled("case14"))
    start = text.index("mpc.bus")
    end = text.index("];", start) + 2
    with pytest.raises(CaseParseError, match="mpc.bus"):
        parse_case(text[:start] + text[end:])


def test_malformed_row():
    text = serialize_case(load_bundled("case14")).replace("\t0.0\t", "\t0.0x\t", 1)
    text = text.replace("mpc.gen = [\n\t1\t", "mpc.gen = [\n\t1\tabc\t", 1)
    with pytest.raises(CaseParseError, match="mpc.gen"):
        parse_case(text)


def test_validation_errors():
    c = two_bus()
    bus = c.bus.copy()
    bus[1, 1] = REF
    with pytest.raises(ValueError, match="slack"):
        PowerFlowCase("x", 100.0, bus, c.gen, c.branch)
    bus = c.bus.copy()
    bus[1, 0] = 1
    with pytest.raises(ValueError, match="duplicate"):
        PowerFlowCase("x", 100.0, bus, c.gen, c.branch)
    br = c.branch.copy()
    br[0, 1] = 9
    with pytest.raises(ValueError):
        PowerFlowCase("x", 100.0, c.bus, c.gen, br)
    with pytest.raises(ValueError):
        PowerFlowCase("x", 0.0, c.bus, c.gen, c.branch)


def test_unknown_columns_warn():
    text = serialize_case(two_bus())
    text = text.replace("mpc.branch = [\n\t1\t2\t0\t0.1\t0\t0\t0\t0\t0\t0\t1\t0\t0;",
                        "mpc.branch = [\n\t1\t2\t0\t0.1\t0\t0\t0\t0\t0\t0\t1\t0\t0\t7\t7;")
    assert "\t7\t7;" in text
    with pytest.warns(UserWarning, match="mpc.branch"):
        c = parse_case(text)
    assert c.branch.shape == (1, 13)


def test_roundtrip(case, tmp_path):
    assert parse_case(serialize_case(case), case.name).equals(case)
    path = tmp_path / "c.m"
    save_case(case, path)
    assert load_case(path).equals(case)


def test_missing_file():
    with pytest.raises(CaseParseError, match="nope.m"):
        load_case("/nonexistent/nope.m")


# ----------------------------------------------------------------- Y-bus

def test_ybus_two_bus():
    y = build_ybus(two_bus())
    assert np.allclose(y, [[-10j, 10j], [10j, -10j]])


def test_ybus_zero_impedance():
    with pytest.raises(NetworkError):
        build_ybus(two_bus(x=0.0))


def test_ybus_symmetric(case):
    assert not np.any(case.branch[:, SHIFT])
    y = build_ybus(case)
    assert np.allclose(y, y.T, rtol=0, atol=1e-12)


def test_ybus_hand_entries():
    c = load_bundled("case14")
    y = build_ybus(c)
    # line 1-2: r=0.01938, x=0.05917, b=0.0528
    ys = 1 / (0.01938 + 0.05917j)
    assert y[0, 1] == pytest.approx(-ys)
    # transformer 4-7 with tap 0.978, x=0.20912
    assert y[3, 6] == pytest.approx(-1 / (0.20912j) / 0.978)
    # bus 9 carries a 19 MVAr shunt: diagonal = branch sum + 0.19j
    br = c.branch
    y9 = 0
    for row in br:
        f, t = int(row[0]), int(row[1])
        if 9 not in (f, t):
            continue
        s = 1 / (row[2] + 1j * row[3])
        tap = row[TAP] or 1.0
        y9 += (s + 0.5j * row[BR_B]) / (tap ** 2 if f == 9 else 1)
    assert y[8, 8] == pytest.approx(y9 + 0.19j)


def test_isolated_bus_zero_row():
    c = two_bus()
    bus = np.vstack([c.bus, c.bus[1]])
    bus[2, 0] = 3
    bus[2, GS] = bus[2, BS] = 0
    c3 = PowerFlowCase("three", 100.0, bus, c.gen, c.branch)
    y = build_ybus(c3)
    assert np.all(y[2] == 0) and np.all(y[:, 2] == 0)


# ----------------------------------------------------- mismatch, Jacobian

def test_zero_load_flat_start():
    c = two_bus()
    s = flat_start(c)
    assert np.allclose(mismatch(c, s), 0)
    res = solve_powerflow(c)
    assert res.converged and res.iterations == 0


def _fd_jacobian(case, state, h=1e-6):
    pvpq, pq = case.pvpq, case.pq
    n = len(pvpq) + len(pq)
    out = np.zeros((n, n))
    for k in range(n):
        plus, minus = state.copy(), state.copy()
        if k < len(pvpq):
            plus.va[pvpq[k]] += h
            minus.va[pvpq[k]] -= h
        else:
            plus.vm[pq[k - len(pvpq)]] += h
            minus.vm[pq[k - len(pvpq)]] -= h
        # mismatch is scheduled minus calculated, the Jacobian differentiates calculated
        out[:, k] = -(mismatch(case, plus) - mismatch(case, minus)) / (2 * h)
    return out


def test_jacobian_finite_difference(case):
    for state in (flat_start(case), solve_powerflow(case).state):
        j = jacobian(case, state).matrix
        assert np.max(np.abs(j - _fd_jacobian(case, state))) < 1e-5


@given(st.integers(0, 2**31 - 1))
def test_jacobian_fd_random_state(seed):
    c = load_bundled("case14")
    r = np.random.default_rng(seed)
    s = flat_start(c)
    s.vm = s.vm + r.uniform(-0.05, 0.05, c.n_bus)
    s.va = s.va + r.uniform(-0.2, 0.2, c.n_bus)
    assert np.max(np.abs(jacobian(c, s).matrix - _fd_jacobian(c, s))) < 1e-5


def test_jacobian_size_case14():
    step = jacobian(load_bundled("case14"), flat_start(load_bundled("case14")))
    assert step.size == 22 and len(step.variable_labels) == 22
    assert step.variable_labels[0] == "theta_2" and step.variable_labels[13] == "vm_4"


def test_two_bus_analytic_jacobian():
    c = two_bus()
    s = PowerFlowState(np.array([1.0, 0.97]), np.array([0.0, -0.1]))
    j = jacobian(c, s).matrix
    # lossless line: P_2 = |V1||V2| B sin(theta_2 - theta_1), so dP_2/dtheta_2 = |V1||V2| B cos
    b = 10.0
    theta = s.va[1] - s.va[0]
    assert j.shape == (2, 2)
    assert j[0, 0] == pytest.approx(s.vm[0] * s.vm[1] * b * np.cos(theta))
    # bus 2 as PV: only its angle is unknown
    c_pv = two_bus()
    bus = c_pv.bus.copy()
    bus[1, 1] = PV
    gen = np.vstack([c_pv.gen, c_pv.gen])
    gen[1, 0] = 2
    c_pv = PowerFlowCase("pv", 100.0, bus, gen, c_pv.branch)
    j1 = jacobian(c_pv, s).matrix
    assert j1.shape == (1, 1) and j1[0, 0] == pytest.approx(s.vm[0] * s.vm[1] * b * np.cos(theta))


# ------------------------------------------------------------------- B'

def test_bprime_sizes():
    assert bprime_matrix(load_bundled("case14")).shape == (13, 13)
    assert bprime_matrix(load_bundled("case30")).shape == (29, 29)


def test_bprime_row_sums(case):
    b = bprime_matrix(case)
    slack = case.ref
    ids = case.bus_ids
    expect = np.zeros(len(case.pvpq))
    pos = {bus: k for k, bus in enumerate(case.pvpq)}
    for row in case.online_branch:
        f, t = case.bus_index(row[[0, 1]])
        if slack in (f, t):
            other = t if f == slack else f
            expect[pos[other]] += 1 / row[3]
    assert np.allclose(b.sum(axis=1), expect, atol=1e-10)
    assert len(ids) == case.n_bus
    assert np.allclose(b, b.T)


# ---------------------------------------------------------------- solving

def test_case14_matches_published_solution():
    res = solve_powerflow(load_bundled("case14"))
    assert res.converged and res.iterations <= 10 and res.mismatch_norm < 1e-8
    assert np.allclose(res.state.vm, CASE14_VM, atol=6e-4)
    assert np.allclose(np.rad2deg(res.state.va), CASE14_VA_DEG, atol=6e-4)


def test_variants_agree(case):
    nr = solve_powerflow(case, variant="newton")
    fd = solve_powerflow(case, variant="fast_decoupled")
    assert nr.iterations <= 10
    assert np.allclose(nr.state.vm, fd.state.vm, atol=1e-7)
    assert np.allclose(nr.state.va, fd.state.va, atol=1e-7)


def test_nonconvergence():
    c = two_bus(pd=500.0, qd=300.0)
    with pytest.raises(PowerFlowError) as info:
        solve_powerflow(c, max_iter=5)
    assert info.value.mismatch_norm > 0 and info.value.state is not None
    assert "5 iterations" in str(info.value)


def test_argument_errors():
    c = two_bus()
    for kw in ({"tol": 0.0}, {"solver": "magic"}, {"variant": "gauss"}, {"max_iter": 0}):
        with pytest.raises(ValueError):
            solve_powerflow(c, **kw)


def test_hhl_step_report():
    c = load_bundled("case14")
    step = bprime_system(c, flat_start(c))
    x, rep = solve_step(step, "hhl", "case14", HHLOptions(n_qpe=7))
    assert rep.l2_error is not None and rep.l2_error >= 0
    assert rep.matrix_size == 13 and rep.solver == "hhl"
    assert np.linalg.norm(x - np.linalg.solve(step.matrix, step.rhs)) == pytest.approx(rep.l2_error)


def test_solver_interchangeability():
    c = load_bundled("case14")
    classical = solve_powerflow(c, variant="fast_decoupled")
    quantum = solve_powerflow(c, solver="hhl", variant="fast_decoupled", tol=1e-6, max_iter=40,
                              hhl=HHLOptions(n_qpe=8))
    worst_step = max(r.l2_error for r in quantum.steps)
    diff = max(np.max(np.abs(quantum.state.va - classical.state.va)),
               np.max(np.abs(quantum.state.vm - classical.state.vm)))
    assert diff <= 10 * worst_step
