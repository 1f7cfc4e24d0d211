"""Pure-Python truncated power-series kernels.

Reference implementation of the routines in ``_kernels.pyx``; selected at
import time when the compiled module is unavailable.  All functions take
equal-length float64 coefficient arrays and return a new array of the same
length.  Preconditions (nonzero leading coefficients) are checked by the
caller in :mod:`ruledsurf.jets`.
"""

import math

import numpy as np


def mul(a, b):
    n = a.shape[0]
    return np.convolve(a, b)[:n]


def div(a, b):
    n = a.shape[0]
    al = a.tolist()
    bl = b.tolist()
    b0 = bl[0]
    c = [0.0] * n
    for i in range(n):
        s = al[i]
        for j in range(1, i + 1):
            s -= bl[j] * c[i - j]
        c[i] = s / b0
    return np.array(c)


def sqrt(a):
    n = a.shape[0]
    al = a.tolist()
    c = [0.0] * n
    c0 = math.sqrt(al[0])
    c[0] = c0
    for i in range(1, n):
        s = al[i]
        for j in range(1, i):
            s -= c[j] * c[i - j]
        c[i] = s / (2.0 * c0)
    return np.array(c)


def exp(a):
    n = a.shape[0]
    al = a.tolist()
    c = [0.0] * n
    c[0] = math.exp(al[0])
    for i in range(1, n):
        s = 0.0
        for j in range(1, i + 1):
            s += j * al[j] * c[i - j]
        c[i] = s / i
    return np.array(c)


def sincos(a):
    n = a.shape[0]
    al = a.tolist()
    s = [0.0] * n
    c = [0.0] * n
    s[0] = math.sin(al[0])
    c[0] = math.cos(al[0])
    for i in range(1, n):
        ss = 0.0
        cc = 0.0
        for j in range(1, i + 1):
            ja = j * al[j]
            ss += ja * c[i - j]
            cc += ja * s[i - j]
        s[i] = ss / i
        c[i] = -cc / i
    return np.array(s), np.array(c)
