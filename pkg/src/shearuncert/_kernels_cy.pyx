# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: window profiles and deterministic pairwise reductions.

Must stay bit-compatible with ``_kernels_py``: same fold-halves reduction
order, same elementary-operation sequence in the window profiles.  Compile
with ``-ffp-contract=off`` so no fused multiply-adds sneak in.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sqrt

cnp.import_array()

cdef double HALF_PI = 1.5707963267948966


cdef double _fold(double[::1] buf, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t h, i
    while m > 1:
        h = m // 2
        for i in range(h):
            buf[i] = buf[i] + buf[i + h]
        m = h
    return buf[0]


cdef Py_ssize_t _pow2_ceil(Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t m = 1
    while m < n:
        m <<= 1
    return m


def pairwise_sum(x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    if n == 0:
        return 0.0
    cdef Py_ssize_t m = _pow2_ceil(n)
    buf_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            buf[i] = xv[i]
    return float(_fold(buf, m))


def abs2_sum(values):
    cdef double complex[::1] v = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = v.shape[0]
    if n == 0:
        return 0.0
    cdef Py_ssize_t m = _pow2_ceil(n)
    buf_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i
    cdef double re, im
    with nogil:
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            buf[i] = re * re + im * im
    return float(_fold(buf, m))


def weighted_abs2_sum(values, weights):
    cdef double complex[::1] v = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64).ravel()
    cdef Py_ssize_t n = v.shape[0]
    if w.shape[0] != n:
        raise ValueError("values and weights must have the same length")
    if n == 0:
        return 0.0
    cdef Py_ssize_t m = _pow2_ceil(n)
    buf_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i
    cdef double re, im
    with nogil:
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            buf[i] = w[i] * (re * re + im * im)
    return float(_fold(buf, m))


def cdot(x, y):
    cdef double complex[::1] a = np.ascontiguousarray(x, dtype=np.complex128).ravel()
    cdef double complex[::1] b = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    cdef Py_ssize_t n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("arrays must have the same length")
    if n == 0:
        return 0j
    cdef Py_ssize_t m = _pow2_ceil(n)
    re_arr = np.zeros(m, dtype=np.float64)
    im_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] bre = re_arr
    cdef double[::1] bim = im_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            bre[i] = a[i].real * b[i].real + a[i].imag * b[i].imag
            bim[i] = a[i].imag * b[i].real - a[i].real * b[i].imag
    return complex(float(_fold(bre, m)), float(_fold(bim, m)))


def cos_bump(t, int order):
    if order < 1:
        raise ValueError("order must be >= 1")
    t_arr = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] tv = t_arr.ravel()
    out_arr = np.zeros_like(t_arr)
    cdef double[::1] out = out_arr.ravel()
    cdef Py_ssize_t i, n = tv.shape[0]
    cdef int k
    cdef double c, acc
    with nogil:
        for i in range(n):
            if fabs(tv[i]) < 1.0:
                c = cos(HALF_PI * tv[i])
                acc = c
                for k in range(order - 1):
                    acc = acc * c
                out[i] = acc
    return out_arr


def sqrt_tri_bump(t):
    t_arr = np.ascontiguousarray(t, dtype=np.float64)
    cdef double[::1] tv = t_arr.ravel()
    out_arr = np.zeros_like(t_arr)
    cdef double[::1] out = out_arr.ravel()
    cdef Py_ssize_t i, n = tv.shape[0]
    with nogil:
        for i in range(n):
            if fabs(tv[i]) < 1.0:
                out[i] = sqrt(1.0 - fabs(tv[i]))
    return out_arr
