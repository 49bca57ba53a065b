# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the hot inner loops: pairwise kernel matrices and
per-coordinate eigenfunction feature tables.  Mirrors _purecore exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin, sqrt

cnp.import_array()

DEF TWO_PI = 6.283185307179586476925286766559
DEF SQRT2 = 1.4142135623730950488016887242097


def periodic_kernel_matrix(
    const double[:, ::1] X,
    const double[:, ::1] Y,
    const double[::1] coeffs,
    double cfac,
):
    """Product over coordinates of 1 + cfac * B({x - y}), B given by ``coeffs``
    (highest degree first).  X is (n, d), Y is (m, d); returns (n, m)."""
    cdef Py_ssize_t n = X.shape[0], m = Y.shape[0], d = X.shape[1]
    cdef Py_ssize_t nc = coeffs.shape[0]
    cdef Py_ssize_t i, j, c, k
    cdef double diff, poly, acc
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(m):
            acc = 1.0
            for c in range(d):
                diff = X[i, c] - Y[j, c]
                diff = diff - (diff // 1.0)  # fractional part in [0, 1)
                poly = 0.0
                for k in range(nc):
                    poly = poly * diff + coeffs[k]
                acc *= 1.0 + cfac * poly
            out[i, j] = acc
    return out_arr


def gaussian_kernel_matrix(
    const double[:, ::1] X,
    const double[:, ::1] Y,
    double gamma,
):
    """exp(-||x - y||^2 / (2 gamma^2)) for all pairs; X (n, d), Y (m, d)."""
    cdef Py_ssize_t n = X.shape[0], m = Y.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double diff, sq, inv = 1.0 / (2.0 * gamma * gamma)
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        for j in range(m):
            sq = 0.0
            for c in range(d):
                diff = X[i, c] - Y[j, c]
                sq += diff * diff
            out[i, j] = exp(-sq * inv)
    return out_arr


def periodic_features_1d(const double[::1] x, Py_ssize_t tmax):
    """(n, tmax+1) table: column 0 is 1, column 2j-1 is sqrt(2)cos(2 pi j x),
    column 2j is sqrt(2)sin(2 pi j x)."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, t, freq
    cdef double ang
    out_arr = np.empty((n, tmax + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        out[i, 0] = 1.0
    for t in range(1, tmax + 1):
        freq = (t + 1) // 2
        if t % 2 == 1:
            for i in range(n):
                out[i, t] = SQRT2 * cos(TWO_PI * freq * x[i])
        else:
            for i in range(n):
                out[i, t] = SQRT2 * sin(TWO_PI * freq * x[i])
    return out_arr


def hermite_features_1d(
    const double[::1] x,
    Py_ssize_t mmax,
    double sqrt2c,
    double cma,
    double kappa,
):
    """(n, mmax+1) table of kappa * exp(-cma x^2) * pi_m(sqrt2c x), where pi_m
    are orthonormal for the weight exp(-v^2); the gaussian prefactor is folded
    into the m = 0 column so the recurrence never overflows."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, m
    cdef double v
    out_arr = np.empty((n, mmax + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    for i in range(n):
        out[i, 0] = kappa * exp(-cma * x[i] * x[i])
    if mmax >= 1:
        for i in range(n):
            out[i, 1] = SQRT2 * sqrt2c * x[i] * out[i, 0]
    for m in range(1, mmax):
        for i in range(n):
            v = sqrt2c * x[i]
            out[i, m + 1] = (
                sqrt(2.0 / (m + 1)) * v * out[i, m]
                - sqrt(m / <double>(m + 1)) * out[i, m - 1]
            )
    return out_arr
