# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated power-series kernels (same contract as _kernels_py)."""

import numpy as np
from libc.math cimport sqrt as c_sqrt, exp as c_exp, sin as c_sin, cos as c_cos


def mul(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double s
    out = np.empty(n)
    cdef double[::1] c = out
    for i in range(n):
        s = 0.0
        for j in range(i + 1):
            s += a[j] * b[i - j]
        c[i] = s
    return out


def div(const double[::1] a, const double[::1] b):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double s, b0 = b[0]
    out = np.empty(n)
    cdef double[::1] c = out
    for i in range(n):
        s = a[i]
        for j in range(1, i + 1):
            s -= b[j] * c[i - j]
        c[i] = s / b0
    return out


def sqrt(const double[::1] a):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double s, c0
    out = np.empty(n)
    cdef double[::1] c = out
    c0 = c_sqrt(a[0])
    c[0] = c0
    for i in range(1, n):
        s = a[i]
        for j in range(1, i):
            s -= c[j] * c[i - j]
        c[i] = s / (2.0 * c0)
    return out


def exp(const double[::1] a):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double s
    out = np.empty(n)
    cdef double[::1] c = out
    c[0] = c_exp(a[0])
    for i in range(1, n):
        s = 0.0
        for j in range(1, i + 1):
            s += j * a[j] * c[i - j]
        c[i] = s / i
    return out


def sincos(const double[::1] a):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double ss, cc, ja
    out_s = np.empty(n)
    out_c = np.empty(n)
    cdef double[::1] s = out_s
    cdef double[::1] c = out_c
    s[0] = c_sin(a[0])
    c[0] = c_cos(a[0])
    for i in range(1, n):
        ss = 0.0
        cc = 0.0
        for j in range(1, i + 1):
            ja = j * a[j]
            ss += ja * c[i - j]
            cc += ja * s[i - j]
        s[i] = ss / i
        c[i] = -cc / i
    return out_s, out_c
