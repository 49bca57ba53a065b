"""Pure-numpy implementations of the hot numeric kernels.

Mirrors the compiled extension `_fastcore`; `dppquad.backend` picks whichever
is importable. Everything here is vectorized over points.
"""

import numpy as np


def periodic_kernel_matrix(X, Y, coeffs, cfac):
    """Pairwise periodic kernel: product over coordinates of 1 + cfac*B({x-y}).

    X: (n, d), Y: (m, d); coeffs: Bernoulli polynomial coefficients, highest
    degree first; cfac: the closed-form scale factor. Returns (n, m).
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    out = np.ones((X.shape[0], Y.shape[0]))
    for c in range(X.shape[1]):
        frac = np.mod(X[:, c, None] - Y[None, :, c], 1.0)
        out *= 1.0 + cfac * np.polyval(coeffs, frac)
    return out


def gaussian_kernel_matrix(X, Y, gamma):
    """Pairwise exp(-|x-y|^2 / (2 gamma^2)) over rows of X (n,d) and Y (m,d)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    sq = np.zeros((X.shape[0], Y.shape[0]))
    for c in range(X.shape[1]):
        diff = X[:, c, None] - Y[None, :, c]
        sq += diff * diff
    return np.exp(-sq / (2.0 * gamma * gamma))


def periodic_features_1d(x, tmax):
    """Columns t=0..tmax of the real Fourier basis at points x.

    t=0 -> 1, t=2j-1 -> sqrt(2) cos(2 pi j x), t=2j -> sqrt(2) sin(2 pi j x).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((x.shape[0], tmax + 1))
    out[:, 0] = 1.0
    jmax = (tmax + 1) // 2
    if jmax >= 1:
        ang = 2.0 * np.pi * np.outer(x, np.arange(1, jmax + 1))
        cos = np.sqrt(2.0) * np.cos(ang)
        sin = np.sqrt(2.0) * np.sin(ang)
        for j in range(1, jmax + 1):
            if 2 * j - 1 <= tmax:
                out[:, 2 * j - 1] = cos[:, j - 1]
            if 2 * j <= tmax:
                out[:, 2 * j] = sin[:, j - 1]
    return out


def hermite_features_1d(x, mmax, sqrt2c, cma, kappa):
    """Columns m=0..mmax of the normalized Hermite eigenbasis at points x.

    Column m is kappa * exp(-cma*x^2) * pi_m(sqrt2c*x) where pi_m are the
    orthonormal polynomials for the weight exp(-v^2). The decaying prefactor
    is folded into pi_0 so the recurrence never overflows at large m.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    v = sqrt2c * x
    out = np.empty((x.shape[0], mmax + 1))
    out[:, 0] = kappa * np.exp(-cma * x * x)
    if mmax >= 1:
        out[:, 1] = np.sqrt(2.0) * v * out[:, 0]
    for m in range(1, mmax):
        out[:, m + 1] = (
            np.sqrt(2.0 / (m + 1)) * v * out[:, m]
            - np.sqrt(m / (m + 1.0)) * out[:, m - 1]
        )
    return out
