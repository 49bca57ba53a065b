"""Kernel families, Mercer spectra, eigenfunctions, and mean elements.

Three reproducing-kernel families are supported, each with an explicit
eigendecomposition of its integral operator with respect to a reference
probability measure dw:

* ``sobolev``  -- periodic Sobolev space on [0,1] (uniform measure), smoothness
  s >= 1.  Per-coordinate eigenfunctions are the real Fourier modes
  1, sqrt(2)cos(2 pi j x), sqrt(2)sin(2 pi j x) with eigenvalues
  max(1, j)^(-2s); the kernel has the Bernoulli-polynomial closed form
  1 + (-1)^(s-1) (2 pi)^(2s)/(2s)! B_{2s}({x-y}).
* ``korobov``  -- the d-fold tensor product of the Sobolev family on [0,1]^d.
* ``gaussian`` -- Gaussian kernel exp(-(x-y)^2/(2 gamma^2)) per coordinate
  under the measure N(0, sigma^2)^d.  With a = 1/(4 sigma^2), b = 1/(2 gamma^2),
  c = sqrt(a^2 + 2ab), A = a + b + c, B = b/A, the per-coordinate eigenvalues
  are sqrt(2a/A) B^m and the eigenfunctions are scaled Hermite functions
  kappa exp(-(c-a)x^2) pi_m(sqrt(2c) x), where pi_m are the orthonormal
  polynomials for the weight exp(-v^2) and kappa = (4 sigma^2 c)^(1/4)
  normalizes them in L2(dw).

Multi-indices are tuples of per-coordinate "flat" indices.  For the periodic
families the flat index t encodes 0 -> constant, 2j-1 -> cos j, 2j -> sin j.
Bases are ordered by decreasing eigenvalue with an exact integer sort key
(periodic: prod max(1, freq)^(2s); gaussian: sum of indices) and ties broken
by ascending colexicographic order of the index tuple, which in one dimension
is exactly "constant < cos < sin, low frequency first".
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import zeta

from . import backend

PERIODIC_FAMILIES = ("sobolev", "korobov")


# ---------------------------------------------------------------------------
# specs and integrands


@dataclass(frozen=True)
class KernelSpec:
    """One kernel family with its parameters.

    ``rank`` restricts the spectrum to its top ``rank`` eigenpairs (a
    finite-rank kernel via the truncated Mercer sum).  ``cap`` raises the
    first ``cap`` eigenvalues to the largest one (the flat-capped variant
    used by the interpolation-residual oracle).  Both default to None.
    """

    family: str
    d: int
    s: int | None = None
    gamma: float | None = None
    sigma: float | None = None
    rank: int | None = None
    cap: int | None = None

    def __post_init__(self):
        if self.family not in PERIODIC_FAMILIES + ("gaussian",):
            raise ValueError(f"unknown family {self.family!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.family == "sobolev" and self.d != 1:
            raise ValueError("the sobolev family is one-dimensional; use korobov")
        if self.family in PERIODIC_FAMILIES:
            if self.s is None or int(self.s) != self.s or self.s < 1:
                raise ValueError("periodic families need integer s >= 1")
        else:
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("gaussian family needs gamma > 0")
            if self.sigma is None or self.sigma <= 0:
                raise ValueError("gaussian family needs sigma > 0")
        if self.rank is not None and self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.cap is not None and self.cap < 1:
            raise ValueError("cap must be >= 1")

    @property
    def is_periodic(self) -> bool:
        return self.family in PERIODIC_FAMILIES


def sobolev_spec(s: int) -> KernelSpec:
    return KernelSpec(family="sobolev", d=1, s=s)


def korobov_spec(s: int, d: int) -> KernelSpec:
    return KernelSpec(family="korobov", d=d, s=s)


def gaussian_spec(gamma: float, sigma: float, d: int = 1) -> KernelSpec:
    return KernelSpec(family="gaussian", d=d, gamma=float(gamma), sigma=float(sigma))


def truncate(spec: KernelSpec, rank: int) -> KernelSpec:
    """Spec whose spectrum keeps only the top ``rank`` eigenpairs."""
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if spec.rank is not None:
        rank = min(rank, spec.rank)
    return replace(spec, rank=rank)


def flat_capped_spec(spec: KernelSpec, N: int) -> KernelSpec:
    """Spec with the first N eigenvalues raised to the largest one."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return replace(spec, cap=N)


def spec_to_json(spec: KernelSpec) -> dict:
    obj = {
        "family": spec.family,
        "s": spec.s,
        "d": spec.d,
        "gamma": spec.gamma,
        "sigma": spec.sigma,
        "rank": spec.rank,
    }
    if spec.cap is not None:
        obj["cap"] = spec.cap
    return obj


def spec_from_json(obj: dict) -> KernelSpec:
    return KernelSpec(
        family=obj["family"],
        d=int(obj.get("d", 1)),
        s=None if obj.get("s") is None else int(obj["s"]),
        gamma=None if obj.get("gamma") is None else float(obj["gamma"]),
        sigma=None if obj.get("sigma") is None else float(obj["sigma"]),
        rank=None if obj.get("rank") is None else int(obj["rank"]),
        cap=None if obj.get("cap") is None else int(obj["cap"]),
    )


@dataclass(frozen=True)
class Integrand:
    """The g defining the target integral: constant one, or a finite list of
    eigenfunction coefficients ((multi-index, coefficient) pairs)."""

    kind: str  # "constant_one" | "coefficients"
    terms: tuple[tuple[tuple[int, ...], float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("constant_one", "coefficients"):
            raise ValueError(f"unknown integrand kind {self.kind!r}")


CONSTANT_ONE = Integrand("constant_one")


def eigen_integrand(pairs) -> Integrand:
    terms = tuple((tuple(int(i) for i in u), float(c)) for u, c in pairs)
    return Integrand("coefficients", terms)


def g_norm(g: Integrand) -> float:
    """L2(dw) norm of g: 1 for the constant, else the l2 coefficient norm."""
    if g.kind == "constant_one":
        return 1.0
    return math.sqrt(sum(c * c for _, c in g.terms))


def integrand_to_json(g: Integrand) -> dict:
    if g.kind == "constant_one":
        return {"kind": "constant_one"}
    return {"kind": "coefficients", "terms": [[list(u), c] for u, c in g.terms]}


def integrand_from_json(obj: dict) -> Integrand:
    if obj["kind"] == "constant_one":
        return CONSTANT_ONE
    return eigen_integrand((u, c) for u, c in obj["terms"])


# ---------------------------------------------------------------------------
# gaussian family constants


@lru_cache(maxsize=None)
def gaussian_constants(gamma: float, sigma: float):
    """(a, b, c, A, B, kappa) for the Hermite eigendecomposition."""
    a = 1.0 / (4.0 * sigma * sigma)
    b = 1.0 / (2.0 * gamma * gamma)
    c = math.sqrt(a * a + 2.0 * a * b)
    A = a + b + c
    B = b / A
    kappa = (4.0 * sigma * sigma * c) ** 0.25
    return a, b, c, A, B, kappa


# ---------------------------------------------------------------------------
# Bernoulli polynomials (exact coefficients, integer s only)


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int):
    # B_0..B_n with the B_1 = -1/2 convention.
    bs = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * bs[j]
        bs.append(-acc / (m + 1))
    return tuple(bs)


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(n: int) -> tuple:
    """Coefficients of B_n(x), highest degree first, as floats."""
    bs = _bernoulli_numbers(n)
    coeffs = [Fraction(math.comb(n, k)) * bs[k] for k in range(n + 1)]
    return tuple(float(c) for c in coeffs)


@lru_cache(maxsize=None)
def _periodic_closed_form(s: int):
    """(coeffs of B_{2s}, scale factor) so k(x,y) = 1 + scale * B_{2s}({x-y})."""
    cfac = (-1.0) ** (s - 1) * (2.0 * math.pi) ** (2 * s) / math.factorial(2 * s)
    return bernoulli_poly_coeffs(2 * s), cfac


# ---------------------------------------------------------------------------
# eigenvalues and ordering


def _flat_frequency(t: int) -> int:
    # 0 -> constant; 2j-1 -> cos j; 2j -> sin j.
    return (t + 1) // 2


def _family_eigenvalue(spec: KernelSpec, u) -> float:
    val = 1.0
    if spec.is_periodic:
        for t in u:
            f = _flat_frequency(t)
            if f > 0:
                val *= float(f) ** (-2 * spec.s)
    else:
        a, _, _, A, B, _ = gaussian_constants(spec.gamma, spec.sigma)
        lead = math.sqrt(2.0 * a / A)
        for m in u:
            val *= lead * B**m
    return val


def _order_key(spec: KernelSpec, u) -> int:
    # Exact integer key, increasing in decreasing eigenvalue.
    if spec.is_periodic:
        key = 1
        for t in u:
            key *= max(1, _flat_frequency(t)) ** (2 * spec.s)
        return key
    return sum(u)


def _ordered_indices(spec: KernelSpec, N: int) -> tuple:
    return _ordered_indices_base(replace(spec, rank=None, cap=None), N)


@lru_cache(maxsize=512)
def _ordered_indices_base(base: KernelSpec, N: int) -> tuple:
    """First N multi-indices in decreasing-eigenvalue order.

    Best-first search over the lattice: a multi-index is generated exactly
    once by only incrementing coordinates at or beyond the last incremented
    position, and the (integer key, reversed-tuple) heap order is monotone
    along those increments.
    """
    d = base.d
    u0 = (0,) * d
    heap = [(_order_key(base, u0), u0[::-1], u0, 0)]
    out = []
    while len(out) < N:
        _, _, u, p = heapq.heappop(heap)
        out.append(u)
        for j in range(p, d):
            v = u[:j] + (u[j] + 1,) + u[j + 1 :]
            heapq.heappush(heap, (_order_key(base, v), v[::-1], v, j))
    return tuple(out)


def eigenvalue(spec: KernelSpec, u) -> float:
    """Eigenvalue of the multi-index u (product over coordinates)."""
    u = tuple(int(t) for t in u)
    if len(u) != spec.d:
        raise ValueError(f"index dimension {len(u)} != spec dimension {spec.d}")
    if any(t < 0 for t in u):
        raise ValueError("indices must be non-negative")
    limit = max(spec.rank or 0, spec.cap or 0)
    if limit:
        pos = _index_positions(spec, limit).get(u)
        if spec.rank is not None and (pos is None or pos >= spec.rank):
            return 0.0
        if spec.cap is not None and pos is not None and pos < spec.cap:
            return _family_eigenvalue(spec, (0,) * spec.d)
    return _family_eigenvalue(spec, u)


def _index_positions(spec: KernelSpec, limit: int) -> dict:
    return _index_positions_base(replace(spec, rank=None, cap=None), limit)


@lru_cache(maxsize=128)
def _index_positions_base(base: KernelSpec, limit: int) -> dict:
    return {u: i for i, u in enumerate(_ordered_indices_base(base, limit))}


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """The first N eigenpairs of a spec, in decreasing-eigenvalue order."""

    spec: KernelSpec
    N: int
    indices: tuple
    eigenvalues: np.ndarray

    def eval_matrix(self, X) -> np.ndarray:
        """E with E[i, j] = e_{indices[i]}(X[j]); X is (n, d) or (n,) for d=1."""
        return feature_matrix(self.spec, self.indices, X)


def spectral_basis(spec: KernelSpec, N: int) -> SpectralBasis:
    if N < 1:
        raise ValueError("N must be >= 1")
    if spec.rank is not None and N > spec.rank:
        raise ValueError(f"basis size {N} exceeds truncated rank {spec.rank}")
    indices = _ordered_indices(spec, N)
    vals = np.array([_family_eigenvalue(spec, u) for u in indices])
    if spec.cap is not None:
        ncap = min(spec.cap, N)
        vals[:ncap] = _family_eigenvalue(spec, indices[0])
    vals.flags.writeable = False
    return SpectralBasis(spec=spec, N=N, indices=indices, eigenvalues=vals)


# ---------------------------------------------------------------------------
# eigenfunction / kernel evaluation


def _as_points(x, d: int):
    """Normalize x to an (n, d) array; also report whether input was a single point."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        if d != 1:
            raise ValueError("scalar point only valid in dimension 1")
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if d == 1:
            return np.ascontiguousarray(arr.reshape(-1, 1)), False
        if arr.shape[0] == d:
            return np.ascontiguousarray(arr.reshape(1, d)), True
        raise ValueError(f"point of length {arr.shape[0]} does not match d={d}")
    if arr.ndim == 2 and arr.shape[1] == d:
        return np.ascontiguousarray(arr), False
    raise ValueError(f"cannot interpret points of shape {arr.shape} for d={d}")


def feature_matrix(spec: KernelSpec, indices, X) -> np.ndarray:
    """(len(indices), n) matrix of eigenfunction values at the points X."""
    pts, _ = _as_points(X, spec.d)
    idx = np.asarray(indices, dtype=np.int64).reshape(len(indices), spec.d)
    E = np.ones((idx.shape[0], pts.shape[0]))
    for c in range(spec.d):
        tmax = int(idx[:, c].max())
        col = np.ascontiguousarray(pts[:, c])
        if spec.is_periodic:
            F = backend.periodic_features_1d(col, tmax)
        else:
            a, _, ccon, _, _, kappa = gaussian_constants(spec.gamma, spec.sigma)
            F = backend.hermite_features_1d(
                col, tmax, math.sqrt(2.0 * ccon), ccon - a, kappa
            )
        E *= F[:, idx[:, c]].T
    return E


def eigenfunction_eval(spec: KernelSpec, u, x):
    """e_u(x); accepts a single point or a batch of points."""
    u = tuple(int(t) for t in u)
    if any(t < 0 for t in u):
        raise ValueError("indices must be non-negative")
    pts, single = _as_points(x, spec.d)
    row = feature_matrix(spec, (u,), pts)[0]
    return float(row[0]) if single else row


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Pairwise kernel values between rows of X and rows of Y."""
    ptsx, _ = _as_points(X, spec.d)
    ptsy, _ = _as_points(Y, spec.d)
    if spec.rank is not None:
        basis = spectral_basis(spec, spec.rank)
        Ex = basis.eval_matrix(ptsx)
        Ey = basis.eval_matrix(ptsy)
        return (Ex * basis.eigenvalues[:, None]).T @ Ey
    if spec.is_periodic:
        coeffs, cfac = _periodic_closed_form(spec.s)
        out = backend.periodic_kernel_matrix(ptsx, ptsy, np.asarray(coeffs), cfac)
    else:
        out = backend.gaussian_kernel_matrix(ptsx, ptsy, spec.gamma)
    if spec.cap is not None:
        basis = spectral_basis(replace(spec, cap=None), spec.cap)
        sig1 = basis.eigenvalues[0]
        Ex = basis.eval_matrix(ptsx)
        Ey = basis.eval_matrix(ptsy)
        out = out + (Ex * (sig1 - basis.eigenvalues)[:, None]).T @ Ey
    return out


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Closed-form kernel value k(x, y)."""
    return float(kernel_matrix(spec, x, y)[0, 0])


def measure_density(spec: KernelSpec, X) -> np.ndarray:
    """Density of dw at the points X (uniform: 1; gaussian: product normal pdf)."""
    pts, _ = _as_points(X, spec.d)
    if spec.is_periodic:
        return np.ones(pts.shape[0])
    var = spec.sigma**2
    logpdf = -0.5 * np.sum(pts * pts, axis=1) / var
    norm = (2.0 * math.pi * var) ** (spec.d / 2.0)
    return np.exp(logpdf) / norm


# ---------------------------------------------------------------------------
# integrand coefficients <g, e_u>


@lru_cache(maxsize=64)
def _gaussian_constant_coeffs(gamma: float, sigma: float, mmax: int):
    """<1, e_m> for m=0..mmax, one coordinate, via exact Gauss-Hermite quadrature.

    The integrand e_m(x) dw/dx is a polynomial times exp(-(a+c)x^2), so a
    quadrature rule matched to that weight is exact for every m <= 2n-1.
    """
    a, _, c, _, _, kappa = gaussian_constants(gamma, sigma)
    n = max(96, mmax // 2 + 8)
    t, w = np.polynomial.hermite_e.hermegauss(n)
    tau = 1.0 / math.sqrt(2.0 * (a + c))
    x = tau * t
    F = backend.hermite_features_1d(x, mmax, math.sqrt(2.0 * c), c - a, kappa)
    # e_m(x) pdf(x) e^{t^2/2} = kappa pi_m(sqrt(2c)x)/sqrt(2 pi sigma^2): the
    # gaussian prefactors cancel against the hermegauss weight exactly, so the
    # rule integrates a pure degree-m polynomial and is exact for m <= 2n-1.
    rest = np.exp(-2.0 * a * x * x + 0.5 * t * t)
    scale = tau / math.sqrt(2.0 * math.pi * sigma * sigma)
    coeffs = scale * (w * rest) @ F
    coeffs.flags.writeable = False
    return coeffs


def integrand_coefficients(spec: KernelSpec, g: Integrand, indices) -> np.ndarray:
    """<g, e_u> for each multi-index u in ``indices``."""
    idx = [tuple(int(t) for t in u) for u in indices]
    if g.kind == "coefficients":
        table = {}
        for u, cval in g.terms:
            table[u] = table.get(u, 0.0) + cval
        return np.array([table.get(u, 0.0) for u in idx])
    if spec.is_periodic:
        zero = (0,) * spec.d
        return np.array([1.0 if u == zero else 0.0 for u in idx])
    mmax = max(max(u) for u in idx)
    c1d = _gaussian_constant_coeffs(spec.gamma, spec.sigma, mmax)
    return np.array([float(np.prod(c1d[list(u)])) for u in idx])


# ---------------------------------------------------------------------------
# mean elements


def mean_element_eval(spec: KernelSpec, g: Integrand, x):
    """mu_g(x) = sum_u sigma_u <g, e_u> e_u(x), via closed forms where exact."""
    pts, single = _as_points(x, spec.d)
    out = _mean_element_values(spec, g, pts)
    return float(out[0]) if single else out


def _mean_element_values(spec, g, pts):
    if g.kind == "coefficients":
        if not g.terms:
            return np.zeros(pts.shape[0])
        idx = [u for u, _ in g.terms]
        coefs = np.array([c for _, c in g.terms])
        sig = np.array([eigenvalue(spec, u) for u in idx])
        E = feature_matrix(spec, idx, pts)
        return (sig * coefs) @ E
    # g identically one
    if spec.is_periodic:
        # the constant is itself an eigenfunction with eigenvalue 1
        return np.ones(pts.shape[0])
    if spec.rank is not None:
        basis = spectral_basis(spec, spec.rank)
        coefs = integrand_coefficients(spec, g, basis.indices)
        return (basis.eigenvalues * coefs) @ basis.eval_matrix(pts)
    gam2 = spec.gamma**2
    var = spec.sigma**2
    amp = (gam2 / (gam2 + var)) ** (spec.d / 2.0)
    out = amp * np.exp(-0.5 * np.sum(pts * pts, axis=1) / (gam2 + var))
    if spec.cap is not None:
        basis = spectral_basis(replace(spec, cap=None), spec.cap)
        sig1 = basis.eigenvalues[0]
        coefs = integrand_coefficients(spec, g, basis.indices)
        out = out + ((sig1 - basis.eigenvalues) * coefs) @ basis.eval_matrix(pts)
    return out


def mean_element_norm_sq(spec: KernelSpec, g: Integrand) -> float:
    """||mu_g||^2_F = sum_u sigma_u <g, e_u>^2."""
    if g.kind == "coefficients":
        if not g.terms:
            return 0.0
        idx = [u for u, _ in g.terms]
        coefs = np.array([c for _, c in g.terms])
        sig = np.array([eigenvalue(spec, u) for u in idx])
        return float(np.sum(sig * coefs * coefs))
    if spec.is_periodic:
        return 1.0
    if spec.rank is not None:
        basis = spectral_basis(spec, spec.rank)
        coefs = integrand_coefficients(spec, g, basis.indices)
        return float(np.sum(basis.eigenvalues * coefs * coefs))
    gam2 = spec.gamma**2
    var = spec.sigma**2
    out = (gam2 / (gam2 + 2.0 * var)) ** (spec.d / 2.0)
    if spec.cap is not None:
        basis = spectral_basis(replace(spec, cap=None), spec.cap)
        sig1 = basis.eigenvalues[0]
        coefs = integrand_coefficients(spec, g, basis.indices)
        out += float(np.sum((sig1 - basis.eigenvalues) * coefs * coefs))
    return out


# ---------------------------------------------------------------------------
# traces and tails


def _coordinate_trace(spec: KernelSpec) -> float:
    if spec.is_periodic:
        return 1.0 + 2.0 * float(zeta(2 * spec.s, 1))
    a, _, _, A, B, _ = gaussian_constants(spec.gamma, spec.sigma)
    return math.sqrt(2.0 * a / A) / (1.0 - B)


def total_trace(spec: KernelSpec) -> float:
    """Sum of all eigenvalues (after any truncation/capping)."""
    if spec.rank is not None:
        return float(np.sum(spectral_basis(spec, spec.rank).eigenvalues))
    out = _coordinate_trace(spec) ** spec.d
    if spec.cap is not None:
        basis = spectral_basis(replace(spec, cap=None), spec.cap)
        out += float(np.sum(basis.eigenvalues[0] - basis.eigenvalues))
    return out


def spectral_tail(spec: KernelSpec, N: int) -> float:
    """r_N = sum of the ordered eigenvalues beyond position N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if spec.rank is not None and N >= spec.rank:
        return 0.0
    partial = float(np.sum(spectral_basis(spec, N).eigenvalues))
    return max(total_trace(spec) - partial, 0.0)


# ---------------------------------------------------------------------------
# numeric quadrature oracles (used by invariant checks and coefficient tests)


@lru_cache(maxsize=8)
def unit_quadrature(n: int = 2001):
    """Gauss-Legendre nodes/weights on [0,1]."""
    t, w = np.polynomial.legendre.leggauss(n)
    return (t + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=8)
def gaussian_quadrature(sigma: float, n: int = 200):
    """Gauss-Hermite nodes/weights for integrating against the N(0, sigma^2) pdf."""
    t, w = np.polynomial.hermite_e.hermegauss(n)
    return sigma * t, w / math.sqrt(2.0 * math.pi)


def measure_quadrature(spec: KernelSpec, n: int | None = None):
    """1-d quadrature matched to the spec's coordinate measure."""
    if spec.is_periodic:
        return unit_quadrature(2001 if n is None else n)
    return gaussian_quadrature(spec.sigma, 200 if n is None else n)
