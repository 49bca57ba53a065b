"""Exact samplers for the projection determinantal point process.

The target process on N points has joint density proportional to
det[(e_n(x_i))_{n,i}]^2 prod_i w(x_i), built from the first N orthonormal
eigenfunctions of a kernel spec.  Two matrix models cover the fast paths:

* periodic d=1 -- eigenvalue angles of a Haar-random N x N unitary (the
  circular unitary ensemble).  The span of the first N eigenfunctions equals
  the span of the complex Fourier modes with frequencies 0, +1, -1, +2, ...,
  so the process is exactly the CUE eigenangle process for every N.
* gaussian d=1 -- the beta=2 Hermite tridiagonal ensemble, rescaled so the
  squared-Vandermonde density carries the weight exp(-2 c x^2).

Everything else (korobov d >= 2, gaussian d >= 2) goes through the generic
sequential chain-rule sampler with rejection from the reference measure.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import spectral
from .errors import RejectionStalled
from .spectral import KernelSpec, SpectralBasis

PROVENANCES = (
    "CUE",
    "HermiteEnsemble",
    "ChainRule",
    "Grid",
    "Halton",
    "IID",
    "Herding",
    "SBQ",
    "GaussHermiteTensor",
)

_MAX_PROPOSALS_PER_STEP = 10**7
_PROPOSAL_BATCH = 64


@dataclass(frozen=True, eq=False)
class NodeSet:
    """N sampled (or constructed) points with their provenance and seed."""

    points: np.ndarray  # (N, d)
    provenance: str
    seed: int = 0

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        elif pts.ndim != 2:
            raise ValueError(f"points must be (N, d), got shape {pts.shape}")
        pts = np.ascontiguousarray(pts)
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class RngStream:
    """A deterministic generator plus the 64-bit seed that created it."""

    seed: int
    gen: np.random.Generator


def rng_stream(seed: int) -> RngStream:
    seed = int(seed) & (2**64 - 1)
    return RngStream(seed=seed, gen=np.random.default_rng(seed))


def derive_seed(master_seed: int, *tags) -> int:
    """Collision-resistant 64-bit child seed from a master seed and tags.

    Hash-based so that the set of child streams does not depend on the order
    in which parallel tasks are launched.
    """
    label = ":".join([str(int(master_seed))] + [str(t) for t in tags])
    digest = hashlib.sha256(label.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def child_stream(master_seed: int, *tags) -> RngStream:
    return rng_stream(derive_seed(master_seed, *tags))


# ---------------------------------------------------------------------------
# matrix models


def sample_cue(N: int, rng: RngStream) -> NodeSet:
    """Eigenvalue angles of a Haar unitary, mapped to [0, 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    gen = rng.gen
    while True:
        Z = (gen.standard_normal((N, N)) + 1j * gen.standard_normal((N, N)))
        Z /= math.sqrt(2.0)
        Q, R = scipy.linalg.qr(Z)
        d = np.diagonal(R)
        # raw QR is not Haar: push the diagonal phases of R back into Q
        Q = Q * (d / np.abs(d))[None, :]
        ev = np.linalg.eigvals(Q)
        x = np.angle(ev) / (2.0 * math.pi) % 1.0
        if np.all(np.isfinite(x)):
            return NodeSet(points=x.reshape(N, 1), provenance="CUE", seed=rng.seed)


def sample_hermite_ensemble(spec: KernelSpec, N: int, rng: RngStream) -> NodeSet:
    """Rescaled beta=2 Hermite ensemble (tridiagonal model).

    Raw eigenvalues have density ~ prod (l_i - l_j)^2 exp(-sum l^2/2); the
    map x = l / (2 sqrt(c)) converts the weight to exp(-2 c x^2), which is the
    squared-Vandermonde density of the gaussian spec's eigenfunction process.
    """
    if spec.family != "gaussian" or spec.d != 1:
        raise ValueError("hermite ensemble requires the gaussian family with d=1")
    if N < 1:
        raise ValueError("N must be >= 1")
    gen = rng.gen
    _, _, c, _, _, _ = spectral.gaussian_constants(spec.gamma, spec.sigma)
    diag = gen.standard_normal(N)
    if N > 1:
        off = np.sqrt(gen.chisquare(2 * np.arange(N - 1, 0, -1))) / math.sqrt(2.0)
        lam = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    else:
        lam = diag
    x = lam / (2.0 * math.sqrt(c))
    return NodeSet(points=x.reshape(N, 1), provenance="HermiteEnsemble", seed=rng.seed)


# ---------------------------------------------------------------------------
# generic chain-rule sampler


def _complex_fourier_features(x: np.ndarray, N: int) -> np.ndarray:
    """(N, n) complex Fourier features with frequencies 0, +1, -1, +2, -2, ...

    Spans the same space as the first N real modes at odd N and keeps the
    process equal to the CUE eigenangle process at even N, where no contiguous
    real block has a constant diagonal.
    """
    t = np.arange(N)
    freqs = np.where(t % 2 == 1, (t + 1) // 2, -(t // 2))
    return np.exp(2j * math.pi * np.outer(freqs, x))


def _chain_features(basis: SpectralBasis, pts: np.ndarray) -> np.ndarray:
    if basis.spec.is_periodic and basis.spec.d == 1:
        return _complex_fourier_features(pts[:, 0], basis.N)
    return basis.eval_matrix(pts)


def _proposal_batch(spec: KernelSpec, n: int, gen: np.random.Generator) -> np.ndarray:
    if spec.is_periodic:
        return gen.random((n, spec.d))
    return gen.normal(0.0, spec.sigma, (n, spec.d))


def _envelope_grid(spec: KernelSpec, N: int) -> np.ndarray:
    if spec.is_periodic:
        if spec.d == 1:
            return np.linspace(0.0, 1.0, 10_000, endpoint=False).reshape(-1, 1)
        if spec.d == 2:
            side = np.linspace(0.0, 1.0, 100, endpoint=False)
            return np.stack(np.meshgrid(side, side), -1).reshape(-1, 2)
        gen = np.random.default_rng(0)
        return gen.random((10_000, spec.d))
    _, _, c, _, _, _ = spectral.gaussian_constants(spec.gamma, spec.sigma)
    half = 1.5 * math.sqrt(N / c) + 3.0 * spec.sigma
    if spec.d == 1:
        return np.linspace(-half, half, 10_000).reshape(-1, 1)
    gen = np.random.default_rng(0)
    return gen.normal(0.0, spec.sigma, (10_000, spec.d))


def _rejection_envelope(basis: SpectralBasis) -> float:
    """Upper bound on the squared feature norm over the domain.

    The proposal is the reference measure itself, so the envelope only needs
    sum_n e_n(x)^2.  For periodic d=1 complex features this is exactly N;
    otherwise the supremum is estimated on a fixed grid and inflated by 1.2
    (overestimation only costs acceptance rate, never correctness).
    """
    spec = basis.spec
    if spec.is_periodic and spec.d == 1:
        return float(basis.N)
    grid = _envelope_grid(spec, basis.N)
    E = basis.eval_matrix(grid)
    return 1.2 * float(np.max(np.sum(E * E, axis=0)))


def sample_chain_rule(basis: SpectralBasis, rng: RngStream) -> NodeSet:
    """Sequential sampler: at step i the accepted point is distributed as the
    conditional of the projection process given the points so far, obtained by
    rejection from the reference measure."""
    spec = basis.spec
    N = basis.N
    gen = rng.gen
    envelope = _rejection_envelope(basis)
    ortho = np.zeros((N, N), dtype=np.complex128 if spec.is_periodic and spec.d == 1 else np.float64)
    points = np.empty((N, spec.d))
    for i in range(N):
        accepted = None
        proposals = 0
        while accepted is None:
            if proposals >= _MAX_PROPOSALS_PER_STEP:
                raise RejectionStalled(
                    f"step {i + 1}/{N}: no acceptance after {proposals} proposals"
                )
            cand = _proposal_batch(spec, _PROPOSAL_BATCH, gen)
            Phi = _chain_features(basis, cand)  # (N, B)
            resid = np.sum(np.abs(Phi) ** 2, axis=0)
            if i:
                proj = ortho[:i].conj() @ Phi  # (i, B)
                resid = resid - np.sum(np.abs(proj) ** 2, axis=0)
            accept = gen.random(_PROPOSAL_BATCH) * envelope < resid
            proposals += _PROPOSAL_BATCH
            hits = np.nonzero(accept)[0]
            if hits.size:
                accepted = int(hits[0])
                points[i] = cand[accepted]
        # extend the orthonormal family with the accepted feature vector;
        # a second projection pass keeps it orthogonal at machine precision
        v = _chain_features(basis, points[i : i + 1])[:, 0]
        for _ in range(2):
            if i:
                v = v - ortho[:i].T @ (ortho[:i].conj() @ v)
        ortho[i] = v / np.linalg.norm(v)
    return NodeSet(points=points, provenance="ChainRule", seed=rng.seed)


def inclusion_density(basis: SpectralBasis, x) -> np.ndarray | float:
    """One-point density K(x,x) w(x) / N of the projection process.

    Integrates to one; for the periodic d=1 process it is identically one.
    """
    spec = basis.spec
    pts, single = spectral._as_points(x, spec.d)
    if spec.is_periodic and spec.d == 1:
        out = np.ones(pts.shape[0])
    else:
        E = basis.eval_matrix(pts)
        out = np.sum(E * E, axis=0) * spectral.measure_density(spec, pts) / basis.N
    return float(out[0]) if single else out


def dpp_nodes(spec: KernelSpec, N: int, rng: RngStream) -> NodeSet:
    """Sample the size-N eigenfunction process of the spec, choosing the
    fastest exact sampler available for the family and dimension."""
    if spec.is_periodic and spec.d == 1:
        return sample_cue(N, rng)
    if spec.family == "gaussian" and spec.d == 1:
        return sample_hermite_ensemble(spec, N, rng)
    return sample_chain_rule(spectral.spectral_basis(spec, N), rng)


# ---------------------------------------------------------------------------
# serialization


def nodeset_to_csv(nodes: NodeSet) -> str:
    buf = io.StringIO()
    buf.write(f"# provenance={nodes.provenance} seed={nodes.seed}\n")
    for row in nodes.points:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def nodeset_from_csv(text: str) -> NodeSet:
    provenance = "IID"
    seed = 0
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("provenance="):
                    provenance = token.split("=", 1)[1]
                elif token.startswith("seed="):
                    seed = int(token.split("=", 1)[1])
            continue
        rows.append([float(v) for v in line.split(",")])
    return NodeSet(points=np.array(rows), provenance=provenance, seed=seed)
