"""Pure numpy gate kernels (fallback when the compiled core is unavailable).

All kernels update ``psi`` in place.  ``psi`` is a contiguous complex128
array of length 2^n in little-endian order: bit q of the index is qubit q.
For multi-qubit dense gates ``qubits[0]`` is the matrix MSB.
"""
import numpy as np

_R2 = 1 / np.sqrt(2)


def _v1(psi, q):
    return psi.reshape(-1, 2, 1 << q)


def _v2(psi, a, b):
    """View with axes (.., bit of max(a,b), .., bit of min(a,b), ..) and a flag."""
    hi, lo = (a, b) if a > b else (b, a)
    v = psi.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    return v, a > b


def _sel(v, a_first, ba, bb):
    # select bit value ba for qubit a and bb for qubit b
    return v[:, ba, :, bb, :] if a_first else v[:, bb, :, ba, :]


def x(psi, q):
    v = _v1(psi, q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = tmp


def y(psi, q):
    v = _v1(psi, q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = -1j * v[:, 1, :]
    v[:, 1, :] = 1j * tmp


def h(psi, q):
    v = _v1(psi, q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = (a + b) * _R2
    v[:, 1, :] = (a - b) * _R2


def diag1(psi, q, d0, d1):
    v = _v1(psi, q)
    if d0 != 1:
        v[:, 0, :] *= d0
    v[:, 1, :] *= d1


def mat1(psi, q, m):
    v = _v1(psi, q)
    a = v[:, 0, :].copy()
    b = v[:, 1, :].copy()
    v[:, 0, :] = m[0, 0] * a + m[0, 1] * b
    v[:, 1, :] = m[1, 0] * a + m[1, 1] * b


def cx(psi, c, t):
    v, f = _v2(psi, c, t)
    tmp = _sel(v, f, 1, 0).copy()
    _sel(v, f, 1, 0)[...] = _sel(v, f, 1, 1)
    _sel(v, f, 1, 1)[...] = tmp


def cphase(psi, a, b, ph):
    v, f = _v2(psi, a, b)
    _sel(v, f, 1, 1)[...] *= ph


def swap(psi, a, b):
    v, f = _v2(psi, a, b)
    tmp = _sel(v, f, 0, 1).copy()
    _sel(v, f, 0, 1)[...] = _sel(v, f, 1, 0)
    _sel(v, f, 1, 0)[...] = tmp


def mat2(psi, q0, q1, m):
    v, f = _v2(psi, q0, q1)
    parts = [_sel(v, f, l >> 1, l & 1).copy() for l in range(4)]
    for r in range(4):
        _sel(v, f, r >> 1, r & 1)[...] = (m[r, 0] * parts[0] + m[r, 1] * parts[1]
                                          + m[r, 2] * parts[2] + m[r, 3] * parts[3])


def matk(psi, qubits, m):
    n = psi.size.bit_length() - 1
    k = len(qubits)
    axes = [n - 1 - q for q in qubits]
    t = psi.reshape((2,) * n)
    out = np.tensordot(m.reshape((2,) * (2 * k)), t, axes=(list(range(k, 2 * k)), axes))
    psi[:] = np.moveaxis(out, list(range(k)), axes).reshape(-1)
