# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled state-vector kernels.

Amplitude arrays are flat complex128; local bit ``b`` of an index selects
the qubit stored at that bit.  Gate matrices arrive flattened row-major,
with the first target as the most significant local bit.
"""

import numpy as np
from libc.math cimport sqrt

NAME = "cython"


cdef inline Py_ssize_t _insert_zero(Py_ssize_t k, int bit) nogil:
    cdef Py_ssize_t low = k & ((<Py_ssize_t>1 << bit) - 1)
    return ((k >> bit) << (bit + 1)) | low


def apply_1q(double complex[::1] psi, int bit, const double complex[::1] u):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t step = <Py_ssize_t>1 << bit
    cdef Py_ssize_t i, j
    cdef double complex a, b
    cdef double complex u00 = u[0], u01 = u[1], u10 = u[2], u11 = u[3]
    with nogil:
        i = 0
        while i < n:
            for j in range(i, i + step):
                a = psi[j]
                b = psi[j + step]
                psi[j] = u00 * a + u01 * b
                psi[j + step] = u10 * a + u11 * b
            i += 2 * step


def apply_2q(double complex[::1] psi, int hi, int lo, const double complex[::1] u):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t mh = <Py_ssize_t>1 << hi
    cdef Py_ssize_t ml = <Py_ssize_t>1 << lo
    cdef int first = hi if hi < lo else lo
    cdef int second = lo if hi < lo else hi
    cdef Py_ssize_t k, base, i01, i10, i11
    cdef double complex a0, a1, a2, a3
    cdef double complex m[16]
    cdef int r
    for r in range(16):
        m[r] = u[r]
    with nogil:
        for k in range(n >> 2):
            base = _insert_zero(_insert_zero(k, first), second)
            i01 = base | ml
            i10 = base | mh
            i11 = i10 | ml
            a0 = psi[base]
            a1 = psi[i01]
            a2 = psi[i10]
            a3 = psi[i11]
            psi[base] = m[0] * a0 + m[1] * a1 + m[2] * a2 + m[3] * a3
            psi[i01] = m[4] * a0 + m[5] * a1 + m[6] * a2 + m[7] * a3
            psi[i10] = m[8] * a0 + m[9] * a1 + m[10] * a2 + m[11] * a3
            psi[i11] = m[12] * a0 + m[13] * a1 + m[14] * a2 + m[15] * a3


def prob_one(const double complex[::1] psi, int bit):
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t step = <Py_ssize_t>1 << bit
    cdef Py_ssize_t k, j
    cdef double total = 0.0
    cdef double complex a
    with nogil:
        for k in range(n >> 1):
            j = _insert_zero(k, bit) | step
            a = psi[j]
            total += a.real * a.real + a.imag * a.imag
    return total


def collapse(const double complex[::1] psi, int bit, int outcome):
    """Project ``bit`` onto ``outcome``, renormalize, and drop that bit."""
    cdef Py_ssize_t half = psi.shape[0] >> 1
    cdef Py_ssize_t step = <Py_ssize_t>1 << bit
    cdef Py_ssize_t shift = step if outcome else 0
    cdef Py_ssize_t k
    cdef double norm = 0.0
    cdef double complex a
    out = np.empty(half, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for k in range(half):
            a = psi[_insert_zero(k, bit) | shift]
            o[k] = a
            norm += a.real * a.real + a.imag * a.imag
        if norm > 0:
            norm = 1.0 / sqrt(norm)
            for k in range(half):
                o[k] = o[k] * norm
    return out
