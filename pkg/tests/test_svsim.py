import numpy as np
import pytest
from hypothesis import given, strategies as st

from hhlflow.circuit import Circuit, circuit_unitary, embed_gate, gate_matrix
from hhlflow.circuit import gates as G
from hhlflow.svsim import (SimulationError, apply_dense, apply_gate, backend, dump_state,
                           from_amplitudes, init_state, load_state, marginal, postselect,
                           postselect_many, probabilities, run, sample)

from conftest import random_state, random_unitary

R2 = 1 / np.sqrt(2)


def _named_gates(q0, q1, r):
    a = r.uniform(-np.pi, np.pi, size=3)
    return [G.h(q0), G.x(q0), G.y(q0), G.z(q0), G.s(q0), G.sdg(q0), G.t(q0), G.tdg(q0),
            G.rx(a[0], q0), G.ry(a[1], q0), G.rz(a[2], q0), G.phase(a[0], q0),
            G.u3(a[0], a[1], a[2], q0), G.cx(q0, q1), G.cx(q1, q0), G.cz(q0, q1),
            G.cphase(a[1], q0, q1), G.swap(q0, q1)]


def bell():
    return Circuit(2).extend([G.h(0), G.cx(0, 1)])


def test_init_state():
    assert np.array_equal(init_state(1).amps, [1, 0])
    s = init_state(3)
    assert s.amps.shape == (8,) and s.amps[0] == 1
    with pytest.raises(SimulationError):
        init_state(0)
    with pytest.raises(SimulationError):
        init_state(27)


def test_h_and_bell():
    assert np.allclose(run(Circuit(1).append(G.h(0))).amps, [R2, R2])
    assert np.allclose(run(bell()).amps, [R2, 0, 0, R2])
    assert np.allclose(run(Circuit(2)).amps, [1, 0, 0, 0])


def test_out_of_range_gate():
    with pytest.raises(SimulationError):
        apply_gate(init_state(2), G.h(3))


def test_backends_listed():
    assert "python" in backend.available()
    assert backend.DEFAULT in backend.available()
    with pytest.raises(ValueError):
        backend.get("fortran")


@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_named_kernels_match_dense_oracle(n, seed):
    r = np.random.default_rng(seed)
    q0, q1 = (int(q) for q in r.choice(n, size=2, replace=False))
    psi = random_state(n, r)
    for name in backend.available():
        kern = backend.get(name)
        for g in _named_gates(q0, q1, r):
            s = from_amplitudes(psi)
            apply_gate(s, g, kern)
            expect = embed_gate(gate_matrix(g), g.qubits, n) @ psi
            assert np.allclose(s.amps, expect, rtol=0, atol=1e-12), (name, g.kind)
            d = from_amplitudes(psi)
            apply_dense(d, g, kern)
            assert np.allclose(s.amps, d.amps, rtol=0, atol=1e-12), (name, g.kind)


@given(st.integers(3, 6), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_dense_kernels_match_oracle(n, k, seed):
    r = np.random.default_rng(seed)
    qs = tuple(int(q) for q in r.choice(n, size=k, replace=False))
    u = random_unitary(1 << k, r)
    psi = random_state(n, r)
    for name in backend.available():
        s = from_amplitudes(psi)
        apply_gate(s, G.unitary(u, qs), name)
        assert np.allclose(s.amps, embed_gate(u, qs, n) @ psi, rtol=0, atol=1e-12)


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_norm_preserved(n, seed):
    r = np.random.default_rng(seed)
    c = Circuit(n)
    for _ in range(30):
        k = 1 if n == 1 else int(r.integers(1, 3))
        qs = tuple(int(q) for q in r.choice(n, size=k, replace=False))
        if r.random() < 0.3:
            c.append(G.unitary(random_unitary(1 << k, r), qs))
        elif k == 1:
            c.append(_named_gates(qs[0], (qs[0] + 1) % 2, r)[int(r.integers(0, 13))])
        else:
            c.append(_named_gates(qs[0], qs[1], r)[int(r.integers(0, 18))])
    for name in backend.available():
        s = run(c, initial=from_amplitudes(random_state(n, r)), kernels=name)
        assert abs(s.norm() - 1) < 1e-9


def test_run_matches_unitary(rng):
    c = Circuit(4)
    for _ in range(5):
        qs = tuple(int(q) for q in rng.choice(4, size=2, replace=False))
        c.append(G.unitary(random_unitary(4, rng), qs))
    for name in backend.available():
        assert np.allclose(run(c, kernels=name).amps, circuit_unitary(c)[:, 0], atol=1e-10)


def test_probabilities():
    s = run(bell())
    assert probabilities(s, [0]) == pytest.approx({"0": 0.5, "1": 0.5})
    assert probabilities(init_state(2), [0, 1]) == {"00": 1.0}


def test_probability_bit_order():
    s = run(Circuit(3).append(G.x(2)))
    assert probabilities(s, [2, 0]) == {"10": 1.0}
    assert probabilities(s, [0, 1, 2]) == {"001": 1.0}


@given(st.integers(2, 6), st.integers(0, 2**31 - 1))
def test_marginal_consistency(n, seed):
    r = np.random.default_rng(seed)
    s = from_amplitudes(random_state(n, r))
    k = int(r.integers(1, n + 1))
    qs = [int(q) for q in r.choice(n, size=k, replace=False)]
    full = np.abs(s.amps) ** 2
    expect = np.zeros(1 << k)
    for i, p in enumerate(full):
        j = sum(((i >> q) & 1) << b for b, q in enumerate(qs))
        expect[j] += p
    assert np.allclose(marginal(s, qs), expect, atol=1e-12)
    assert abs(sum(probabilities(s, qs).values()) - 1) < 1e-9


def test_invalid_subsets():
    s = init_state(2)
    for bad in ([], [0, 0], [2]):
        with pytest.raises(SimulationError):
            marginal(s, bad)


def test_postselect():
    s, p = postselect(run(bell()), 0, 0)
    assert p == pytest.approx(0.5)
    assert np.allclose(s.amps, [1, 0, 0, 0])
    with pytest.raises(SimulationError):
        postselect(run(Circuit(1).append(G.x(0))), 0, 0)


def test_postselect_many(rng):
    psi = random_state(3, rng)
    s, p = postselect_many(from_amplitudes(psi), {0: 1, 2: 0})
    keep = [1, 3]
    assert p == pytest.approx(np.sum(np.abs(psi[keep]) ** 2))
    assert np.allclose(s.amps[keep], psi[keep] / np.sqrt(p))


def test_sample():
    assert sample(init_state(1), 100, seed=1).counts == {"0": 100}
    res = sample(run(bell()), 10000, seed=7)
    assert set(res.counts) == {"00", "11"}
    assert sum(res.counts.values()) == 10000
    sigma = np.sqrt(10000 * 0.25)
    assert abs(res.counts["00"] - 5000) < 5 * sigma
    assert sample(run(bell()), 500, seed=3).counts == sample(run(bell()), 500, seed=3).counts
    with pytest.raises(SimulationError):
        sample(init_state(1), 0)


def test_dump_roundtrip(tmp_path, rng):
    s = from_amplitudes(random_state(5, rng))
    path = tmp_path / "state.bin"
    dump_state(s, path)
    raw = path.read_bytes()
    assert int.from_bytes(raw[:8], "little") == 32 and len(raw) == 8 + 32 * 16
    back = load_state(path)
    assert np.array_equal(back.amps, s.amps)


def test_forced_python_backend(monkeypatch):
    import importlib

    monkeypatch.setenv("HHLFLOW_KERNELS", "python")
    mod = importlib.reload(backend)
    try:
        assert mod.DEFAULT == "python"
    finally:
        monkeypatch.delenv("HHLFLOW_KERNELS")
        importlib.reload(backend)
