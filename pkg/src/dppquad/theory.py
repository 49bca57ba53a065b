"""Numerical oracles for the convergence bound and the determinant identities.

These functions turn the analysis behind the quadrature error bound into
computable quantities: the bound itself, the expected determinant ratio of a
projection sample, principal angles and leverage scores with their rank-1
update laws, the Maclaurin inequality used in the tail estimates, and the
asymptotic eigenvalue-decay proxies.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import quadrature, spectral
from .errors import DegenerateNodes, RankDeficient
from .sampling import NodeSet
from .spectral import KernelSpec, SpectralBasis, flat_capped_spec  # noqa: F401  (re-export)

_EARLY_EXIT = 1e-30
_OVERFLOW_X = 50.0


def theorem_bound(spec: KernelSpec, N: int, g_norm1: float = 1.0) -> float:
    """Upper bound on the expected optimal squared error at N nodes:

        2 sigma_{N+1} + 2 g1^2 sum_{l=1}^{N} (sigma_1 / l!^2) (N r_N / sigma_1)^l,

    where r_N is the spectral tail.  Returns +inf when the series overflows
    (the bound is vacuous in that regime rather than an error).
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    depth = N + 1 if spec.rank is None else min(N + 1, spec.rank)
    basis = spectral.spectral_basis(spec, depth)
    sigma1 = float(basis.eigenvalues[0])
    sigma_next = float(basis.eigenvalues[N]) if depth == N + 1 else 0.0
    r_n = spectral.spectral_tail(spec, N)
    x = N * r_n / sigma1
    if x > _OVERFLOW_X and N > 10:
        return math.inf
    total = np.longdouble(0.0)
    term = np.longdouble(sigma1) * np.longdouble(x)  # l = 1
    for ell in range(1, N + 1):
        total += term
        if term > 1e300:
            return math.inf
        if total > 0 and term / total < _EARLY_EXIT:
            break
        term = term * np.longdouble(x) / np.longdouble((ell + 1) ** 2)
    return float(2.0 * sigma_next + 2.0 * g_norm1**2 * float(total))


def _elementary_symmetric(values: np.ndarray, order: int) -> np.ndarray:
    """e_0..e_order of the given values via the standard DP recurrence."""
    e = np.zeros(order + 1, dtype=np.longdouble)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + np.longdouble(v) * e[:-1]
    return e


def expected_cos_product(
    spec: KernelSpec, N: int, truncation: int | None = None
) -> tuple[float, float]:
    """Expected determinant ratio of an N-point projection sample.

    Equals sum over size-N subsets T of the spectrum of prod_{t in T} sigma_t,
    normalized by prod_{n <= N} sigma_n.  Returns (value, truncation_error)
    where the error term bounds the contribution of eigenvalues beyond the
    truncation point via the Maclaurin inequality.  With truncation=None the
    smallest M <= 10^4 with relative error below 10^-3 is used.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if truncation is None:
        M = max(2 * N, 32)
        while True:
            value, err = expected_cos_product(spec, N, truncation=M)
            if err < 1e-3 * value or M >= 10_000:
                return value, err
            M = min(2 * M, 10_000)
    if truncation < N:
        raise ValueError("truncation must be at least N")
    M = truncation
    if spec.rank is not None:
        M = min(M, spec.rank)
    basis = spectral.spectral_basis(spec, M)
    sigma1 = float(basis.eigenvalues[0])
    rho = np.asarray(basis.eigenvalues, dtype=np.longdouble) / np.longdouble(sigma1)
    lead = rho[:N]
    e = _elementary_symmetric(rho, N)
    denom = np.prod(lead)
    value = float(e[N] / denom)
    tail = np.longdouble(spectral.spectral_tail(spec, M)) / np.longdouble(sigma1)
    err = np.longdouble(0.0)
    fact = np.longdouble(1.0)
    for j in range(1, N + 1):
        fact *= j
        err += e[N - j] * tail**j / fact
    return value, float(err / denom)


def cos_product_statistic(basis: SpectralBasis, nodes: NodeSet) -> float:
    """det K(x) / (prod_n sigma_n * det^2 E(x)) for one node set; always >= 1.

    Log-domain evaluation: Cholesky for K, row-rescaled slogdet for E, so the
    ratio survives fast-decaying spectra without underflow.
    """
    spec = basis.spec
    N = basis.N
    if len(nodes) != N:
        raise ValueError(f"node count {len(nodes)} != basis size {N}")
    E = basis.eval_matrix(nodes.points)
    scales = np.sqrt(np.sum(E * E, axis=1))
    if not np.all(scales > 0):
        raise DegenerateNodes("eigenfunction matrix has a zero row")
    sign, logdet_scaled = np.linalg.slogdet(E / scales[:, None])
    if sign == 0 or not np.isfinite(logdet_scaled):
        raise DegenerateNodes("eigenfunction determinant underflowed")
    logdet_e = logdet_scaled + float(np.sum(np.log(scales)))
    K = quadrature.gram_matrix(spec, nodes)
    try:
        chol = scipy.linalg.cholesky(K, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateNodes("gram matrix not positive definite") from exc
    logdet_k = 2.0 * float(np.sum(np.log(np.diagonal(chol))))
    logsig = float(np.sum(np.log(basis.eigenvalues)))
    return float(np.exp(logdet_k - logsig - 2.0 * logdet_e))


def principal_angles(gram_ab: np.ndarray) -> np.ndarray:
    """Cosines of the principal angles between two subspaces, given the
    cross-Gram matrix of their orthonormal bases; descending in [0, 1]."""
    w = scipy.linalg.svd(np.asarray(gram_ab, dtype=np.float64), compute_uv=False)
    return np.clip(w, 0.0, 1.0)


def leverage_scores(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column leverage scores of a short-fat full-rank matrix.

    Returns (tau, cross) with tau_i = a_i' (A A')^{-1} a_i in [0, 1] and
    cross_{ij} = a_i' (A A')^{-1} a_j; tau is the diagonal of cross.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    try:
        factor = scipy.linalg.cho_factor(A @ A.T)
    except scipy.linalg.LinAlgError as exc:
        raise RankDeficient("A A' is singular; A must have full row rank") from exc
    cross = A.T @ scipy.linalg.cho_solve(factor, A)
    return np.diagonal(cross).copy(), cross


def leverage_rank1_update(A: np.ndarray, i: int, rho: float) -> tuple[float, np.ndarray]:
    """Closed-form leverage scores after scaling column i by sqrt(1 + rho).

    Returns (new tau_i, full updated score vector): the boosted column moves to
    (1+rho) tau_i / (1 + rho tau_i) and every other column drops by
    rho cross_{ij}^2 / (1 + rho tau_i).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    tau, cross = leverage_scores(A)
    M = tau.shape[0]
    if not 0 <= i < M:
        raise ValueError(f"column index {i} out of range for M={M}")
    denom = 1.0 + rho * tau[i]
    updated = tau - rho * cross[i] ** 2 / denom
    updated[i] = (1.0 + rho) * tau[i] / denom
    return float(updated[i]), updated


def maclaurin_check(nu, ell: int) -> tuple[float, float]:
    """(p_ell(nu), p_1(nu)^ell / ell!) with the inequality p_ell <= bound
    verified; raises if the non-negative inputs ever violate it."""
    nu = np.asarray(nu, dtype=np.float64)
    if np.any(nu < 0):
        raise ValueError("nu must be non-negative")
    if not 1 <= ell <= nu.shape[0]:
        raise ValueError("ell must be in [1, len(nu)]")
    p = float(_elementary_symmetric(nu.astype(np.longdouble), ell)[ell])
    bound = float(nu.sum()) ** ell / math.factorial(ell)
    if p > bound * (1.0 + 1e-12):
        raise ValueError(f"maclaurin inequality violated: {p} > {bound}")
    return p, bound


@lru_cache(maxsize=32)
def _gaussian_proxy_fit(spec: KernelSpec) -> tuple[float, float]:
    """(beta, delta) fitted by least squares of log sigma_{N+1} against
    N^(1/d) over N in [10, 200]."""
    ns = np.arange(10, 201)
    basis = spectral.spectral_basis(spec, int(ns[-1]) + 1)
    logs = np.log(np.asarray(basis.eigenvalues)[ns])
    z = ns ** (1.0 / spec.d)
    slope, intercept = np.polyfit(z, logs, 1)
    dfact = math.factorial(spec.d) ** (1.0 / spec.d)
    return math.exp(intercept / spec.d), -slope / dfact


def eigenvalue_rate_proxy(spec: KernelSpec, N: int) -> tuple[float, float]:
    """(exact sigma_{N+1}, asymptotic decay proxy).

    Periodic: (log N)^(2s(d-1)) N^(-2s) with no fitted constant.  Gaussian:
    beta^d exp(-delta (d!)^(1/d) N^(1/d)) with beta, delta fitted once per
    spec on N in [10, 200].
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    basis = spectral.spectral_basis(spec, N + 1)
    sigma_next = float(basis.eigenvalues[N])
    if spec.is_periodic:
        proxy = math.log(N) ** (2 * spec.s * (spec.d - 1)) * float(N) ** (-2 * spec.s)
    else:
        beta, delta = _gaussian_proxy_fit(spec)
        dfact = math.factorial(spec.d) ** (1.0 / spec.d)
        proxy = beta**spec.d * math.exp(-delta * dfact * N ** (1.0 / spec.d))
    return sigma_next, proxy


def interpolation_residual(basis: SpectralBasis, nodes: NodeSet, n: int) -> float:
    """Squared distance from the unit-normalized n-th eigenfunction to the
    span of the kernel translates at the nodes: 1 - sigma_n e' K^{-1} e."""
    if not 0 <= n < basis.N:
        raise ValueError(f"n must be in [0, {basis.N})")
    e = basis.eval_matrix(nodes.points)[n]
    K = quadrature.gram_matrix(basis.spec, nodes)
    try:
        factor = scipy.linalg.cho_factor(K)
    except scipy.linalg.LinAlgError as exc:
        raise DegenerateNodes("gram matrix not positive definite") from exc
    val = 1.0 - float(basis.eigenvalues[n]) * float(e @ scipy.linalg.cho_solve(factor, e))
    return min(max(val, 0.0), 1.0)
