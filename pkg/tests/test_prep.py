import numpy as np
import pytest
from hypothesis import given, strategies as st

from hhlflow.prep import (DEFAULT_KAPPA_THRESHOLD, PrepError, condition_number,
                          expand_to_power_of_2, gauss_seidel_precondition, hermitize,
                          normalize_rhs, prepare, recover_solution, solution_norm)


def _random_system(n, r, complex_=False, diag_dominant=True):
    a = r.normal(size=(n, n))
    if complex_:
        a = a + 1j * r.normal(size=(n, n))
    if diag_dominant:
        a = a + np.diag(np.abs(a).sum(axis=1) + 1)
    b = r.normal(size=n) + (1j * r.normal(size=n) if complex_ else 0)
    return a, b


def _exact_recovery(p):
    """Feed ``recover_solution`` the exact normalised solution of the prepared system."""
    y = np.linalg.solve(p.matrix, p.b_normalized)
    norm = np.linalg.norm(y)
    c = 0.37
    return recover_solution(p, y / norm * np.exp(0.9j), (c * norm) ** 2, c)


def test_normalize():
    u, n = normalize_rhs([3.0, 4.0])
    assert n == 5 and np.allclose(u, [0.6, 0.8])
    with pytest.raises(PrepError):
        normalize_rhs([0.0, 0.0])


def test_condition_number():
    assert condition_number(np.diag([1.0, 4.0])) == pytest.approx(4.0)
    assert condition_number(np.eye(3)) == pytest.approx(1.0)
    with pytest.raises(PrepError, match="singular"):
        condition_number(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(PrepError):
        condition_number(np.ones((2, 3)))


def test_expand():
    a, b, pad = expand_to_power_of_2(np.diag([2.0, 3.0, 5.0]), [1.0, 1.0, 1.0])
    assert pad == 1 and a.shape == (4, 4)
    assert a[3, 3] == 1 and b[3] == 0
    a, b, pad = expand_to_power_of_2(np.eye(4), np.ones(4))
    assert pad == 0
    a, b, pad = expand_to_power_of_2(np.array([[2.0]]), [1.0])
    assert a.shape == (1, 1) and pad == 0


def test_hermitize(rng):
    a, b = _random_system(3, rng, diag_dominant=False)
    h, bb, flag = hermitize(a, b)
    assert flag and h.shape == (6, 6)
    assert np.allclose(h, h.conj().T)
    y = np.linalg.solve(h, bb)
    assert np.allclose(y[3:], np.linalg.solve(a, b))
    s = a + a.T
    _, _, flag = hermitize(s, b)
    assert not flag


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_gauss_seidel_same_solution(n, seed):
    r = np.random.default_rng(seed)
    a, b = _random_system(n, r)
    pa, pb, m = gauss_seidel_precondition(a, b)
    assert np.allclose(np.linalg.solve(pa, pb), np.linalg.solve(a, b), atol=1e-9)
    assert np.allclose(m @ pa, a, atol=1e-9)
    assert np.allclose(np.triu(m, 1), 0)


def test_gauss_seidel_zero_diagonal():
    with pytest.raises(PrepError):
        gauss_seidel_precondition(np.array([[0.0, 1.0], [1.0, 0.0]]), [1.0, 1.0])


def test_prepare_flags():
    p = prepare(np.diag([1.0, 2.0]), [1.0, 0.0])
    assert not p.hermitized and not p.preconditioned and p.padding == 0
    assert p.n_data == 1 and p.b_norm == 1
    p = prepare(np.array([[2.0, 1.0], [0.0, 3.0]]), [1.0, 1.0])
    assert p.hermitized and p.dimension == 4
    p = prepare(np.diag([1.0, 2.0, 3.0]), [1.0, 1.0, 1.0])
    assert p.padding == 1 and p.dimension == 4
    with pytest.raises(PrepError):
        prepare(np.eye(2), [1.0, 1.0, 1.0])


def test_prepare_preconditioner_policy():
    a = np.diag([1.0, 300.0]) + 0.1
    assert condition_number(a) > DEFAULT_KAPPA_THRESHOLD
    assert prepare(a, [1.0, 1.0]).preconditioned
    assert not prepare(a, [1.0, 1.0], use_preconditioner=False).preconditioned
    assert prepare(np.eye(2) * 2 + 0.1, [1.0, 1.0], use_preconditioner=True).preconditioned
    assert not prepare(a, [1.0, 1.0], kappa_threshold=1e6).preconditioned


@given(st.integers(1, 7), st.booleans(), st.sampled_from([None, True, False]),
       st.integers(0, 2**31 - 1))
def test_roundtrip(n, complex_, precond, seed):
    r = np.random.default_rng(seed)
    a, b = _random_system(n, r, complex_=complex_)
    p = prepare(a, b, use_preconditioner=precond)
    assert p.dimension & (p.dimension - 1) == 0
    assert np.allclose(p.matrix, p.matrix.conj().T)
    assert abs(np.linalg.norm(p.b_normalized) - 1) < 1e-12
    x = _exact_recovery(p)
    expect = np.linalg.solve(a, b)
    assert np.allclose(x, expect, rtol=1e-8, atol=1e-10)
    assert np.iscomplexobj(x) == complex_


def test_solution_norm():
    assert solution_norm(0.25, 0.5) == pytest.approx(1.0)
    with pytest.raises(PrepError):
        solution_norm(0.0, 1.0)


def test_recover_identity():
    p = prepare(np.eye(2), [3.0, 4.0])
    # exact success branch for A = I with constant c: amplitude c, so P = c^2
    x = recover_solution(p, np.array([0.6, 0.8]), 0.5 ** 2, 0.5)
    assert np.allclose(x, [3.0, 4.0])
