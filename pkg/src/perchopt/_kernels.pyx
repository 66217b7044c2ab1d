# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation kernels.

Same signatures and accumulation order as ``perchopt._pykernels``.
"""
import numpy as np

from libc.math cimport cos, exp, fabs, floor, sin, sqrt, M_PI, M_E

cdef double TWO_PI = 2.0 * M_PI


cdef double[:, ::1] _as2d(X):
    arr = np.ascontiguousarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D array of shape (rows, dims)")
    return arr


def sphere(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = x[i, j]
            s += c * c
        o[i] = s
    return out


def shifted_sphere(X, double shift, double offset):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = x[i, j] + shift
            s += c * c
        o[i] = s + offset
    return out


def sum_squares_plus_product(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, p, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        p = 1.0
        for j in range(x.shape[1]):
            c = x[i, j]
            s += c * c
            p *= fabs(c)
        o[i] = s + p
    return out


def cumulative_sum_squares(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, run
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        run = 0.0
        for j in range(x.shape[1]):
            run += x[i, j]
            s += run * run
        o[i] = s
    return out


def max_abs(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = fabs(x[i, j])
            if c > s:
                s = c
        o[i] = s
    return out


def rosenbrock(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, a, b
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1] - 1):
            a = x[i, j + 1] - x[i, j] * x[i, j]
            b = x[i, j] - 1.0
            s += 100.0 * a * a + b * b
        o[i] = s
    return out


def step(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = floor(x[i, j] + 0.5)
            s += c * c
        o[i] = s
    return out


def quartic(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c2
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c2 = x[i, j] * x[i, j]
            s += (j + 1.0) * (c2 * c2)
        o[i] = s
    return out


def schwefel(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = x[i, j]
            s += -c * sin(sqrt(fabs(c)))
        o[i] = s
    return out


def rastrigin(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        for j in range(x.shape[1]):
            c = x[i, j]
            s += c * c - 10.0 * cos(TWO_PI * c) + 10.0
        o[i] = s
    return out


def ackley(X):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef Py_ssize_t m = x.shape[1]
    cdef double s1, s2, c
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s1 = 0.0
        s2 = 0.0
        for j in range(m):
            c = x[i, j]
            s1 += c * c
            s2 += cos(TWO_PI * c)
        o[i] = -20.0 * exp(-0.2 * sqrt(s1 / m)) - exp(s2 / m) + 20.0 + M_E
    return out


def griewank(X, bint printed=False):
    cdef double[:, ::1] x = _as2d(X)
    cdef Py_ssize_t i, j
    cdef double s, p, c, div
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        s = 0.0
        p = 1.0
        for j in range(x.shape[1]):
            c = x[i, j]
            s += c * c
            div = (j + 1.0) if printed else sqrt(j + 1.0)
            p *= cos(c / div)
        o[i] = s / 4000.0 - p + 1.0
    return out


def goldstein_price(X):
    cdef double[:, ::1] x = _as2d(X)
    if x.shape[1] != 2:
        raise ValueError("goldstein_price is defined for 2 dimensions only")
    cdef Py_ssize_t i
    cdef double u, v, a, b, c, d
    out = np.empty(x.shape[0])
    cdef double[::1] o = out
    for i in range(x.shape[0]):
        u = x[i, 0]
        v = x[i, 1]
        a = u + v + 1.0
        b = 19.0 - 14.0 * u + 3.0 * u * u - 14.0 * v + 6.0 * u * v + 3.0 * v * v
        c = 2.0 * u - 3.0 * v
        d = 18.0 - 32.0 * u + 12.0 * u * u + 48.0 * v - 36.0 * u * v + 27.0 * v * v
        o[i] = (1.0 + a * a * b) * (30.0 + c * c * d)
    return out


def gear_scan(long lo, long hi, double target):
    """Exhaustive search of the gear-ratio error over [lo, hi]^4."""
    if hi < lo:
        raise ValueError("empty range")
    cdef long x1, x2, x3, x4
    cdef double best = float("inf")
    cdef double e
    for x1 in range(lo, hi + 1):
        for x2 in range(lo, hi + 1):
            for x3 in range(lo, hi + 1):
                for x4 in range(lo, hi + 1):
                    e = target - (<double>(x2 * x3)) / (<double>(x1 * x4))
                    e = e * e
                    if e < best:
                        best = e
    tuples = []
    for x1 in range(lo, hi + 1):
        for x2 in range(lo, hi + 1):
            for x3 in range(lo, hi + 1):
                for x4 in range(lo, hi + 1):
                    e = target - (<double>(x2 * x3)) / (<double>(x1 * x4))
                    if e * e == best:
                        tuples.append((x1, x2, x3, x4))
    return best, tuples
