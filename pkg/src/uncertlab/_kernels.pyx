# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: fused elementwise ops and reductions.

Same API as ``uncertlab._kernels_py``.  Loops are fused to avoid the
temporaries numpy allocates for expressions like ``af - mean*f``.
Input views are const so read-only wavefunction buffers pass through.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

NAME = "compiled"


def wnorm2(f):
    cdef const double complex[::1] a = np.ascontiguousarray(f).ravel()
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += a[i].real * a[i].real + a[i].imag * a[i].imag
    return acc


def wdot(f, g):
    cdef const double complex[::1] a = np.ascontiguousarray(f).ravel()
    cdef const double complex[::1] b = np.ascontiguousarray(g).ravel()
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double re = 0.0, im = 0.0
    cdef double ar, ai, br, bi
    if b.shape[0] != n:
        raise ValueError("shape mismatch")
    for i in range(n):
        ar = a[i].real; ai = a[i].imag
        br = b[i].real; bi = b[i].imag
        re += ar * br + ai * bi
        im += ai * br - ar * bi
    return complex(re, im)


def mul(sym, f):
    out = np.empty_like(f)
    cdef const double complex[::1] src = np.ascontiguousarray(f).ravel()
    cdef double complex[::1] dst = out.ravel()
    cdef const double[::1] sr
    cdef const double complex[::1] sc
    cdef Py_ssize_t i, n = src.shape[0]
    if sym.dtype == np.float64:
        sr = np.ascontiguousarray(sym).ravel()
        for i in range(n):
            dst[i] = sr[i] * src[i]
    else:
        sc = np.ascontiguousarray(sym, dtype=np.complex128).ravel()
        for i in range(n):
            dst[i] = sc[i] * src[i]
    return out


def scale_add(acc, alpha, x):
    cdef double complex[::1] a = acc.ravel()
    cdef const double complex[::1] b = np.ascontiguousarray(x).ravel()
    cdef double complex al = alpha
    cdef Py_ssize_t i, n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("shape mismatch")
    for i in range(n):
        a[i] = a[i] + al * b[i]


def free_phase(p2, c, f):
    out = np.empty_like(f)
    cdef const double[::1] q = np.ascontiguousarray(p2).ravel()
    cdef const double complex[::1] src = np.ascontiguousarray(f).ravel()
    cdef double complex[::1] dst = out.ravel()
    cdef double cc = c, ph, cr, ci
    cdef Py_ssize_t i, n = src.shape[0]
    for i in range(n):
        ph = cc * q[i]
        cr = cos(ph); ci = sin(ph)
        dst[i] = cr * src[i] + 1j * (ci * src[i])
    return out


def dev_norm2(af, mean, f):
    cdef const double complex[::1] a = np.ascontiguousarray(af).ravel()
    cdef const double complex[::1] b = np.ascontiguousarray(f).ravel()
    cdef double m = mean
    cdef double acc = 0.0, dr, di
    cdef Py_ssize_t i, n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError("shape mismatch")
    for i in range(n):
        dr = a[i].real - m * b[i].real
        di = a[i].imag - m * b[i].imag
        acc += dr * dr + di * di
    return acc
