"""Optimal quadrature weights and exact RKHS error evaluation.

Given nodes x_1..x_N, the optimal weights for integrating against g solve
K(x) w = mu_g(x), where K is the kernel Gram matrix and mu_g is the mean
element.  The squared worst-case error of any weighted rule is the quadratic

    ||mu_g||^2 - 2 w' mu_g(x) + w' K(x) w,

evaluated here entirely from closed forms (never from sampled estimates).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import sampling, spectral
from .errors import LengthMismatch, NegativeError, SingularGram, UnsupportedIntegrand
from .sampling import NodeSet
from .spectral import Integrand, KernelSpec

_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    spec: KernelSpec
    nodes: NodeSet
    weights: np.ndarray
    g: Integrand
    jittered: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.shape[0] != len(self.nodes):
            raise LengthMismatch(
                f"{w.shape[0]} weights for {len(self.nodes)} nodes"
            )
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def gram_matrix(spec: KernelSpec, nodes: NodeSet) -> np.ndarray:
    """N x N kernel matrix, exactly symmetric (upper triangle mirrored)."""
    K = spectral.kernel_matrix(spec, nodes.points, nodes.points)
    upper = np.triu(K)
    return upper + np.triu(K, 1).T


def solve_weights(spec: KernelSpec, nodes: NodeSet, g: Integrand) -> QuadratureRule:
    """Optimal-weight rule.  One jittered retry on factorization failure, then
    one iterative-refinement pass in extended precision."""
    N = len(nodes)
    if N == 0:
        return QuadratureRule(spec, nodes, np.zeros(0), g)
    K = gram_matrix(spec, nodes)
    mu = np.atleast_1d(spectral.mean_element_eval(spec, g, nodes.points))
    jittered = False
    try:
        factor = scipy.linalg.cho_factor(K)
    except scipy.linalg.LinAlgError:
        jittered = True
        K = K + (1e-12 * np.trace(K) / N) * np.eye(N)
        try:
            factor = scipy.linalg.cho_factor(K)
        except scipy.linalg.LinAlgError as exc:
            raise SingularGram(
                f"gram matrix not positive definite for N={N} even after jitter"
            ) from exc
    w = scipy.linalg.cho_solve(factor, mu)
    resid = (mu.astype(np.longdouble) - K.astype(np.longdouble) @ w).astype(np.float64)
    w = w + scipy.linalg.cho_solve(factor, resid)
    return QuadratureRule(spec, nodes, w, g, jittered=jittered)


def squared_error(rule: QuadratureRule) -> float:
    """Exact squared RKHS error of the rule, clamped near zero.

    Values in [-1e-10, 0) round up to 0; anything more negative raises,
    since the quadratic is non-negative in exact arithmetic.
    """
    norm_sq = spectral.mean_element_norm_sq(rule.spec, rule.g)
    if len(rule.nodes) == 0:
        return float(norm_sq)
    K = gram_matrix(rule.spec, rule.nodes).astype(np.longdouble)
    mu = np.atleast_1d(
        spectral.mean_element_eval(rule.spec, rule.g, rule.nodes.points)
    ).astype(np.longdouble)
    w = rule.weights.astype(np.longdouble)
    val = float(np.longdouble(norm_sq) - 2.0 * (w @ mu) + w @ (K @ w))
    if val < 0.0:
        if val < -_CLAMP:
            raise NegativeError(f"squared error {val} below the -1e-10 clamp")
        return 0.0
    return val


def uniform_weight_rule(spec: KernelSpec, nodes: NodeSet, g: Integrand) -> QuadratureRule:
    """Equal weights 1/N; defined only for the constant integrand."""
    if g.kind != "constant_one":
        raise UnsupportedIntegrand("uniform weights are defined only for g = 1")
    N = len(nodes)
    if N == 0:
        raise ValueError("uniform weights need at least one node")
    return QuadratureRule(spec, nodes, np.full(N, 1.0 / N), g)


def integrate(rule: QuadratureRule, f_values) -> float:
    f = np.asarray(f_values, dtype=np.float64).reshape(-1)
    if f.shape[0] != rule.weights.shape[0]:
        raise LengthMismatch(
            f"{f.shape[0]} integrand values for {rule.weights.shape[0]} weights"
        )
    return float(rule.weights @ f)


# ---------------------------------------------------------------------------
# serialization


def rule_to_json(rule: QuadratureRule) -> dict:
    return {
        "spec": spectral.spec_to_json(rule.spec),
        "nodes": {
            "points": rule.nodes.points.tolist(),
            "provenance": rule.nodes.provenance,
            "seed": rule.nodes.seed,
        },
        "weights": rule.weights.tolist(),
        "g": spectral.integrand_to_json(rule.g),
        "jittered": rule.jittered,
    }


def rule_from_json(obj: dict) -> QuadratureRule:
    nodes = sampling.NodeSet(
        points=np.array(obj["nodes"]["points"], dtype=np.float64),
        provenance=obj["nodes"]["provenance"],
        seed=int(obj["nodes"]["seed"]),
    )
    return QuadratureRule(
        spec=spectral.spec_from_json(obj["spec"]),
        nodes=nodes,
        weights=np.array(obj["weights"], dtype=np.float64),
        g=spectral.integrand_from_json(obj["g"]),
        jittered=bool(obj["jittered"]),
    )
