"""Competing node designs: Monte Carlo, herding, sequential Bayesian
quadrature, leverage-score quadrature, uniform grids, Halton points, and
tensor Gauss-Hermite rules."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import ndtri

from . import quadrature, spectral
from .errors import NotAPower
from .quadrature import QuadratureRule
from .sampling import NodeSet, RngStream
from .spectral import CONSTANT_ONE, Integrand, KernelSpec


@dataclass(frozen=True)
class BaselineConfig:
    """Options for the greedy and regularized baselines."""

    candidate_pool_size: int = 4096
    sbq_jitter: float = 1e-10
    lam: float = 0.0

    def __post_init__(self):
        if self.candidate_pool_size < 64:
            raise ValueError("candidate_pool_size must be >= 64")
        if self.sbq_jitter <= 0:
            raise ValueError("sbq_jitter must be positive")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


DEFAULT_CONFIG = BaselineConfig()


def mc_nodes(spec: KernelSpec, N: int, rng: RngStream) -> NodeSet:
    """N i.i.d. draws from the reference measure."""
    if N < 0:
        raise ValueError("N must be >= 0")
    gen = rng.gen
    if spec.is_periodic:
        pts = gen.random((N, spec.d))
    else:
        pts = gen.normal(0.0, spec.sigma, (N, spec.d))
    return NodeSet(points=pts.reshape(N, spec.d), provenance="IID", seed=rng.seed)


# ---------------------------------------------------------------------------
# candidate pools for the greedy methods

_POOL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


def _candidate_pool(spec: KernelSpec, size: int, rng: RngStream) -> np.ndarray:
    """Deterministic-per-seed pool: an additive-recurrence lattice with a
    random shift on the torus, or stratified Gaussian quantiles."""
    gen = rng.gen
    if spec.is_periodic:
        alphas = np.sqrt(np.array(_POOL_PRIMES[: spec.d], dtype=np.float64)) % 1.0
        k = np.arange(1, size + 1)[:, None]
        return (k * alphas[None, :] + gen.random(spec.d)[None, :]) % 1.0
    strata = np.stack([gen.permutation(size) for _ in range(spec.d)], axis=1)
    u = (strata + gen.random((size, spec.d))) / size
    return spec.sigma * ndtri(u)


def herding_nodes(
    spec: KernelSpec,
    N: int,
    config: BaselineConfig = DEFAULT_CONFIG,
    rng: RngStream | None = None,
    g: Integrand = CONSTANT_ONE,
) -> NodeSet:
    """Greedy minimization of the worst-case error of the uniform-weight rule.

    Adding candidate x as the t-th point changes the objective (up to terms
    not involving x) by k(x,x)/2 + sum_j k(x_j, x) - t mu_g(x), so each step
    picks the pool argmin of that score, without replacement.
    """
    if rng is None:
        raise ValueError("herding needs an RngStream for its candidate pool")
    pool = _candidate_pool(spec, config.candidate_pool_size, rng)
    mu = np.atleast_1d(spectral.mean_element_eval(spec, g, pool))
    diag = np.diagonal(spectral.kernel_matrix(spec, pool, pool)).copy()
    ksum = np.zeros(pool.shape[0])
    taken = np.zeros(pool.shape[0], dtype=bool)
    chosen = []
    for t in range(1, N + 1):
        score = 0.5 * diag + ksum - t * mu
        score[taken] = np.inf
        pick = int(np.argmin(score))
        taken[pick] = True
        chosen.append(pick)
        ksum += spectral.kernel_matrix(spec, pool, pool[pick : pick + 1])[:, 0]
    return NodeSet(points=pool[chosen], provenance="Herding", seed=rng.seed)


def sbq_nodes(
    spec: KernelSpec,
    N: int,
    config: BaselineConfig = DEFAULT_CONFIG,
    rng: RngStream | None = None,
    g: Integrand = CONSTANT_ONE,
) -> NodeSet:
    """Greedy minimization of the optimal-weight squared error.

    A bordered Cholesky factorization of the jittered Gram matrix scores every
    remaining pool candidate in O(pool * t) per step: with L the factor of
    K_t + jitter I and y = L^{-1} mu_t, appending x gives the error decrease
    (mu(x) - z'y)^2 / (k(x,x) + jitter - z'z) with z = L^{-1} k(x_t, x).
    """
    if rng is None:
        raise ValueError("sbq needs an RngStream for its candidate pool")
    pool = _candidate_pool(spec, config.candidate_pool_size, rng)
    P = pool.shape[0]
    mu = np.atleast_1d(spectral.mean_element_eval(spec, g, pool))
    Kpool = spectral.kernel_matrix(spec, pool, pool)
    diag = np.diagonal(Kpool) + config.sbq_jitter
    taken = np.zeros(P, dtype=bool)
    chosen: list[int] = []
    L = np.zeros((N, N))
    Z = np.zeros((N, P))  # running L^{-1} K[chosen, :] border solves
    y = np.zeros(N)
    for t in range(N):
        s2 = diag - np.sum(Z[:t] ** 2, axis=0)
        gains = (mu - y[:t] @ Z[:t]) ** 2 / np.maximum(s2, 1e-300)
        gains[taken] = -np.inf
        pick = int(np.argmax(gains))
        taken[pick] = True
        chosen.append(pick)
        # border update of the Cholesky factor with row k(x_pick, chosen)
        s = math.sqrt(max(s2[pick], 1e-300))
        L[t, :t] = Z[:t, pick]
        L[t, t] = s
        y[t] = (mu[pick] - y[:t] @ Z[:t, pick]) / s
        Z[t] = (Kpool[pick] - L[t, :t] @ Z[:t]) / s
    return NodeSet(points=pool[chosen], provenance="SBQ", seed=rng.seed)


def lvsq_rule(
    spec: KernelSpec,
    N: int,
    lam: float,
    rng: RngStream,
    g: Integrand = CONSTANT_ONE,
) -> QuadratureRule:
    """Ridge-regularized weights on i.i.d. uniform nodes.

    Restricted to the periodic families, where the optimal leverage-score
    proposal is the uniform density itself.  lam = 0 reduces to the plain
    optimal-weight solve.
    """
    if not spec.is_periodic:
        raise ValueError("leverage-score quadrature is defined here for the periodic families only")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    nodes = NodeSet(points=rng.gen.random((N, spec.d)), provenance="IID", seed=rng.seed)
    if lam == 0.0:
        return quadrature.solve_weights(spec, nodes, g)
    K = quadrature.gram_matrix(spec, nodes)
    mu = np.atleast_1d(spectral.mean_element_eval(spec, g, nodes.points))
    w = scipy.linalg.solve(
        K + lam * N * np.eye(N), mu, assume_a="pos"
    )
    return QuadratureRule(spec, nodes, w, g)


def grid_nodes(spec: KernelSpec, N: int) -> NodeSet:
    """Midpoint grid: (j + 0.5)/N in d=1; the ceil(N^(1/d))-per-axis product
    grid truncated to N points in row-major order otherwise."""
    if not spec.is_periodic:
        raise ValueError("uniform grids are defined on the periodic domain only")
    if N < 1:
        raise ValueError("N must be >= 1")
    if spec.d == 1:
        pts = ((np.arange(N) + 0.5) / N).reshape(N, 1)
    else:
        m = math.ceil(N ** (1.0 / spec.d))
        while (m - 1) ** spec.d >= N:
            m -= 1
        side = (np.arange(m) + 0.5) / m
        pts = np.array(list(itertools.product(side, repeat=spec.d)))[:N]
    return NodeSet(points=pts, provenance="Grid", seed=0)


def _radical_inverse(k: int, base: int) -> float:
    inv = 0.0
    denom = 1.0
    while k > 0:
        k, digit = divmod(k, base)
        denom *= base
        inv += digit / denom
    return inv


def halton_nodes(spec: KernelSpec, N: int) -> NodeSet:
    """First N Halton points (index starting at 1), bases (2) or (2, 3)."""
    if not spec.is_periodic:
        raise ValueError("halton nodes are defined on the periodic domain only")
    if spec.d > 2:
        raise ValueError("halton nodes support d <= 2")
    bases = (2, 3)[: spec.d]
    pts = np.array(
        [[_radical_inverse(k, b) for b in bases] for k in range(1, N + 1)]
    )
    return NodeSet(points=pts, provenance="Halton", seed=0)


def gauss_hermite_tensor_nodes(spec: KernelSpec, N: int) -> NodeSet:
    """Tensor product of the m-point Gauss-Hermite abscissas, N = m^d."""
    if spec.family != "gaussian":
        raise ValueError("gauss-hermite nodes require the gaussian family")
    m = round(N ** (1.0 / spec.d))
    if m < 1 or m**spec.d != N:
        raise NotAPower(f"N={N} is not an integer power m^{spec.d}")
    roots = spec.sigma * np.polynomial.hermite_e.hermegauss(m)[0]
    pts = np.array(list(itertools.product(roots, repeat=spec.d)))
    return NodeSet(points=pts, provenance="GaussHermiteTensor", seed=0)
