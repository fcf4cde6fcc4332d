# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels.

Same contract as ``_pykernels``: in-place updates of a contiguous complex128
statevector, little-endian qubit order, ``qubits[0]`` is the matrix MSB for
dense multi-qubit gates.  Outer loops run under OpenMP ``prange``; every
amplitude is owned by exactly one iteration, so no two threads write the same
index within a gate.
"""
from cython.parallel cimport prange, threadid

import numpy as np

ctypedef double complex cplx

cdef int _threads = 1
# below this many loop iterations the thread start-up costs more than it saves
cdef Py_ssize_t PAR_MIN = 1 << 14


def set_num_threads(int n):
    global _threads
    _threads = n if n > 0 else 1


def get_num_threads():
    return _threads


cdef inline Py_ssize_t _ins1(Py_ssize_t i, int q) noexcept nogil:
    # insert a zero bit at position q
    return ((i >> q) << (q + 1)) | (i & ((<Py_ssize_t>1 << q) - 1))


cdef inline Py_ssize_t _ins2(Py_ssize_t i, int lo, int hi) noexcept nogil:
    return _ins1(_ins1(i, lo), hi)


cdef inline int _nt(Py_ssize_t work) noexcept nogil:
    return _threads if work >= PAR_MIN else 1


def x(cplx[::1] psi, int q):
    cdef int nt
    cdef Py_ssize_t half = psi.shape[0] >> 1, i, i0, i1
    cdef Py_ssize_t bit = <Py_ssize_t>1 << q
    cdef cplx tmp
    nt = _nt(half)
    for i in prange(half, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins1(i, q)
        i1 = i0 | bit
        tmp = psi[i0]
        psi[i0] = psi[i1]
        psi[i1] = tmp


def y(cplx[::1] psi, int q):
    cdef int nt
    cdef Py_ssize_t half = psi.shape[0] >> 1, i, i0, i1
    cdef Py_ssize_t bit = <Py_ssize_t>1 << q
    cdef cplx a
    nt = _nt(half)
    for i in prange(half, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins1(i, q)
        i1 = i0 | bit
        a = psi[i0]
        psi[i0] = -1j * psi[i1]
        psi[i1] = 1j * a


def h(cplx[::1] psi, int q):
    cdef int nt
    cdef Py_ssize_t half = psi.shape[0] >> 1, i, i0, i1
    cdef Py_ssize_t bit = <Py_ssize_t>1 << q
    cdef cplx a, b
    cdef double r = 0.7071067811865476
    nt = _nt(half)
    for i in prange(half, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins1(i, q)
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = (a + b) * r
        psi[i1] = (a - b) * r


cdef inline void _scale(double* p, Py_ssize_t n, double re, double im) noexcept nogil:
    # p holds n interleaved (re, im) pairs; plain real arithmetic vectorises cleanly
    cdef Py_ssize_t j
    cdef double a, b
    for j in range(n):
        a = p[2 * j]
        b = p[2 * j + 1]
        p[2 * j] = a * re - b * im
        p[2 * j + 1] = a * im + b * re


def diag1(cplx[::1] psi, int q, cplx d0, cplx d1):
    cdef int nt
    cdef Py_ssize_t half = psi.shape[0] >> 1
    cdef Py_ssize_t bit = <Py_ssize_t>1 << q
    cdef Py_ssize_t nblk = half >> q, b, c, base, chunk, nchunk
    cdef bint skip0 = d0 == 1
    cdef double r0 = d0.real, i0 = d0.imag, r1 = d1.real, i1 = d1.imag
    cdef double* p = <double*>&psi[0]
    cdef Py_ssize_t i
    cdef double a, im_, re, ii
    nt = _nt(half)
    if q < 3:
        # runs too short to loop over; pick the factor per amplitude
        for i in prange(2 * half, nogil=True, num_threads=nt, schedule="static"):
            if i & bit:
                re = r1
                ii = i1
            else:
                re = r0
                ii = i0
            a = p[2 * i]
            im_ = p[2 * i + 1]
            p[2 * i] = a * re - im_ * ii
            p[2 * i + 1] = a * ii + im_ * re
    # contiguous runs of 2^q amplitudes share a bit value
    elif nblk >= bit:
        for b in prange(nblk, nogil=True, num_threads=nt, schedule="static"):
            base = b << (q + 1)
            if not skip0:
                _scale(p + 2 * base, bit, r0, i0)
            _scale(p + 2 * (base + bit), bit, r1, i1)
    else:
        # few long runs: split each run into chunks for the threads
        chunk = bit // nt if nt > 1 else bit
        nchunk = bit // chunk
        for b in range(nblk):
            base = b << (q + 1)
            for c in prange(nchunk, nogil=True, num_threads=nt, schedule="static"):
                if not skip0:
                    _scale(p + 2 * (base + c * chunk), chunk, r0, i0)
                _scale(p + 2 * (base + bit + c * chunk), chunk, r1, i1)


def mat1(cplx[::1] psi, int q, m):
    cdef int nt
    cdef const cplx[:, ::1] mm = np.ascontiguousarray(m, dtype=np.complex128)
    cdef cplx m00 = mm[0, 0], m01 = mm[0, 1], m10 = mm[1, 0], m11 = mm[1, 1]
    cdef Py_ssize_t half = psi.shape[0] >> 1, i, i0, i1
    cdef Py_ssize_t bit = <Py_ssize_t>1 << q
    cdef cplx a, b
    nt = _nt(half)
    for i in prange(half, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins1(i, q)
        i1 = i0 | bit
        a = psi[i0]
        b = psi[i1]
        psi[i0] = m00 * a + m01 * b
        psi[i1] = m10 * a + m11 * b


def cx(cplx[::1] psi, int c, int t):
    cdef int nt
    cdef Py_ssize_t quarter = psi.shape[0] >> 2, i, i0, i1
    cdef int lo = c if c < t else t
    cdef int hi = t if c < t else c
    cdef Py_ssize_t cb = <Py_ssize_t>1 << c, tb = <Py_ssize_t>1 << t
    cdef cplx tmp
    nt = _nt(quarter)
    for i in prange(quarter, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins2(i, lo, hi) | cb
        i1 = i0 | tb
        tmp = psi[i0]
        psi[i0] = psi[i1]
        psi[i1] = tmp


def cphase(cplx[::1] psi, int a, int b, cplx ph):
    cdef int nt
    cdef Py_ssize_t quarter = psi.shape[0] >> 2, i, i0
    cdef int lo = a if a < b else b
    cdef int hi = b if a < b else a
    cdef Py_ssize_t both = (<Py_ssize_t>1 << a) | (<Py_ssize_t>1 << b)
    nt = _nt(quarter)
    for i in prange(quarter, nogil=True, num_threads=nt, schedule="static"):
        i0 = _ins2(i, lo, hi) | both
        psi[i0] = psi[i0] * ph


def swap(cplx[::1] psi, int a, int b):
    cdef int nt
    cdef Py_ssize_t quarter = psi.shape[0] >> 2, i, base
    cdef int lo = a if a < b else b
    cdef int hi = b if a < b else a
    cdef Py_ssize_t ab = <Py_ssize_t>1 << a, bb = <Py_ssize_t>1 << b
    cdef cplx tmp
    nt = _nt(quarter)
    for i in prange(quarter, nogil=True, num_threads=nt, schedule="static"):
        base = _ins2(i, lo, hi)
        tmp = psi[base | ab]
        psi[base | ab] = psi[base | bb]
        psi[base | bb] = tmp


def mat2(cplx[::1] psi, int q0, int q1, m):
    cdef int nt
    cdef const cplx[:, ::1] mm = np.ascontiguousarray(m, dtype=np.complex128)
    cdef Py_ssize_t quarter = psi.shape[0] >> 2, i, base
    cdef int lo = q0 if q0 < q1 else q1
    cdef int hi = q1 if q0 < q1 else q0
    cdef Py_ssize_t b0 = <Py_ssize_t>1 << q0, b1 = <Py_ssize_t>1 << q1
    cdef Py_ssize_t j0, j1, j2, j3
    cdef cplx a0, a1, a2, a3
    nt = _nt(quarter)
    for i in prange(quarter, nogil=True, num_threads=nt, schedule="static"):
        base = _ins2(i, lo, hi)
        # local index l = 2*bit(q0) + bit(q1)
        j0 = base
        j1 = base | b1
        j2 = base | b0
        j3 = base | b0 | b1
        a0 = psi[j0]
        a1 = psi[j1]
        a2 = psi[j2]
        a3 = psi[j3]
        psi[j0] = mm[0, 0] * a0 + mm[0, 1] * a1 + mm[0, 2] * a2 + mm[0, 3] * a3
        psi[j1] = mm[1, 0] * a0 + mm[1, 1] * a1 + mm[1, 2] * a2 + mm[1, 3] * a3
        psi[j2] = mm[2, 0] * a0 + mm[2, 1] * a1 + mm[2, 2] * a2 + mm[2, 3] * a3
        psi[j3] = mm[3, 0] * a0 + mm[3, 1] * a1 + mm[3, 2] * a2 + mm[3, 3] * a3


def matk(cplx[::1] psi, qubits, m):
    cdef int nt
    cdef const cplx[:, ::1] mm = np.ascontiguousarray(m, dtype=np.complex128)
    cdef int k = len(qubits)
    cdef Py_ssize_t dim = <Py_ssize_t>1 << k
    cdef Py_ssize_t groups = psi.shape[0] >> k
    cdef Py_ssize_t[::1] offs = np.zeros(dim, dtype=np.intp)
    cdef int[::1] sortq = np.sort(np.asarray(qubits, dtype=np.intc))
    cdef Py_ssize_t l, r, g, base, j
    cdef int jq
    cdef cplx acc
    cdef cplx* buf
    for l in range(dim):
        for j in range(k):
            if (l >> (k - 1 - j)) & 1:
                offs[l] |= <Py_ssize_t>1 << <int>qubits[j]
    nt = _nt(groups * dim)
    # one gather buffer per thread, indexed by thread id
    cdef cplx[:, ::1] scratch = np.empty((nt, dim), dtype=np.complex128)
    for g in prange(groups, nogil=True, num_threads=nt, schedule="static"):
        buf = &scratch[threadid(), 0]
        base = g
        for jq in range(k):
            base = _ins1(base, sortq[jq])
        for l in range(dim):
            buf[l] = psi[base + offs[l]]
        for r in range(dim):
            acc = 0
            for l in range(dim):
                acc = acc + mm[r, l] * buf[l]
            psi[base + offs[r]] = acc
