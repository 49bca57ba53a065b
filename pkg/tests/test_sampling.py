"""Sampler distribution checks.

The statistical gates follow the fixed protocol: KS/chi-square thresholds at
p > 0.001, negative-correlation and moment checks at 3 standard errors, all
with pinned seeds.
"""

import math

import numpy as np
import pytest
import scipy.stats

import dppquad as dq
from dppquad import sampling as sm
from dppquad import spectral as sp
from dppquad.errors import RejectionStalled

SOB1 = dq.sobolev_spec(1)
GAUSS = dq.gaussian_spec(0.5, 1.0)


def draws(sampler, n_draws, seed):
    stream = sm.rng_stream(seed)
    return [sampler(stream) for _ in range(n_draws)]


def test_determinism_same_seed():
    for build in (
        lambda r: sm.sample_cue(4, r),
        lambda r: sm.sample_hermite_ensemble(GAUSS, 4, r),
        lambda r: sm.sample_chain_rule(dq.spectral_basis(dq.korobov_spec(1, 2), 3), r),
        lambda r: sm.dpp_nodes(SOB1, 5, r),
    ):
        a = build(sm.rng_stream(99))
        b = build(sm.rng_stream(99))
        assert np.array_equal(a.points, b.points)
        assert a.provenance == b.provenance


def test_nodeset_validation():
    with pytest.raises(ValueError):
        sm.NodeSet(np.zeros((2, 2, 2)), "IID", 0)
    ns = sm.NodeSet(np.array([0.1, 0.2]), "IID", 7)
    assert ns.points.shape == (2, 1)
    assert len(ns) == 2


def test_cue_single_point_uniform():
    pts = np.array([n.points[0, 0] for n in draws(lambda r: sm.sample_cue(1, r), 10_000, 1)])
    assert np.all((pts >= 0) & (pts < 1))
    assert scipy.stats.kstest(pts, "uniform").pvalue > 0.001


def test_cue_pair_repulsion():
    gaps = []
    for n in draws(lambda r: sm.sample_cue(2, r), 10_000, 2):
        d = abs(n.points[0, 0] - n.points[1, 0])
        gaps.append(min(d, 1.0 - d))
    assert np.mean(np.asarray(gaps) < 0.05) < 0.1


def test_cue_one_point_density_uniform():
    pts = np.concatenate([n.points.ravel() for n in draws(lambda r: sm.sample_cue(4, r), 10_000, 3)])
    counts, _ = np.histogram(pts, bins=20, range=(0.0, 1.0))
    assert scipy.stats.chisquare(counts).pvalue > 0.001


def test_hermite_single_point_variance():
    a, b, c, A, B, _ = sp.gaussian_constants(0.5, 1.0)
    xs = np.array(
        [n.points[0, 0] for n in draws(lambda r: sm.sample_hermite_ensemble(GAUSS, 1, r), 10_000, 4)]
    )
    want = 1.0 / (4.0 * c)
    # variance of the sample variance for a Gaussian: 2 sigma^4 / (n-1)
    se = math.sqrt(2.0 * want**2 / (len(xs) - 1))
    assert abs(xs.var(ddof=1) - want) <= 3 * se


def test_hermite_pair_mean_symmetry():
    sums = np.array(
        [n.points.sum() for n in draws(lambda r: sm.sample_hermite_ensemble(GAUSS, 2, r), 10_000, 5)]
    )
    assert abs(sums.mean()) <= 3 * sums.std(ddof=1) / math.sqrt(len(sums))


def test_hermite_one_point_density_tv():
    basis = dq.spectral_basis(GAUSS, 5)
    pts = np.concatenate(
        [n.points.ravel() for n in draws(lambda r: sm.sample_hermite_ensemble(GAUSS, 5, r), 100_000, 6)]
    )
    lo, hi = pts.min() - 1e-9, pts.max() + 1e-9
    counts, edges = np.histogram(pts, bins=50, range=(lo, hi))
    emp = counts / counts.sum()
    t, w = np.polynomial.legendre.leggauss(16)
    pred = np.empty(50)
    for i in range(50):
        a_, b_ = edges[i], edges[i + 1]
        xs = (a_ + b_) / 2 + (b_ - a_) / 2 * t
        dens = np.array([sm.inclusion_density(basis, float(x)) for x in xs])
        pred[i] = (b_ - a_) / 2 * float(np.sum(w * dens))
    pred = pred / pred.sum()
    tv = 0.5 * np.abs(emp - pred).sum()
    assert tv < 0.05


def test_chain_rule_sobolev_marginals_uniform():
    basis1 = dq.spectral_basis(SOB1, 1)
    pts = np.array(
        [n.points[0, 0] for n in draws(lambda r: sm.sample_chain_rule(basis1, r), 10_000, 7)]
    )
    assert scipy.stats.kstest(pts, "uniform").pvalue > 0.001

    basis4 = dq.spectral_basis(SOB1, 4)
    pooled = np.concatenate(
        [n.points.ravel() for n in draws(lambda r: sm.sample_chain_rule(basis4, r), 10_000, 8)]
    )
    counts, _ = np.histogram(pooled, bins=20, range=(0.0, 1.0))
    assert scipy.stats.chisquare(counts).pvalue > 0.001


def test_chain_rule_matches_hermite_ensemble():
    basis = dq.spectral_basis(GAUSS, 4)
    a = np.concatenate(
        [n.points.ravel() for n in draws(lambda r: sm.sample_chain_rule(basis, r), 5_000, 9)]
    )
    b = np.concatenate(
        [n.points.ravel() for n in draws(lambda r: sm.sample_hermite_ensemble(GAUSS, 4, r), 5_000, 10)]
    )
    assert scipy.stats.ks_2samp(a, b).pvalue > 0.001


def test_inclusion_density_examples():
    for N in (1, 4, 7):
        basis = dq.spectral_basis(SOB1, N)
        for x in (0.0, 0.31, 0.99):
            assert math.isclose(sm.inclusion_density(basis, x), 1.0, rel_tol=1e-12)

    basis = dq.spectral_basis(GAUSS, 5)
    xs = np.linspace(-1.6, 1.6, 2001)
    dens = np.array([sm.inclusion_density(basis, float(x)) for x in xs])
    interior = (dens[1:-1] > dens[:-2]) & (dens[1:-1] > dens[2:])
    assert int(interior.sum()) == 5

    pts, w = sp.measure_quadrature(GAUSS)
    total = sum(wi * sm.inclusion_density(basis, float(x)) / sp.measure_density(GAUSS, x)
                for x, wi in zip(pts, w))
    assert abs(total - 1.0) < 1e-4


def _occupancy(sets, cell_a, cell_b):
    in_a = np.array([np.any((n >= cell_a[0]) & (n < cell_a[1])) for n in sets])
    in_b = np.array([np.any((n >= cell_b[0]) & (n < cell_b[1])) for n in sets])
    n = len(sets)
    pa, pb, pab = in_a.mean(), in_b.mean(), (in_a & in_b).mean()
    se = math.sqrt(pab * (1 - pab) / n) + pa * math.sqrt(pb * (1 - pb) / n) + pb * math.sqrt(pa * (1 - pa) / n)
    return pab - pa * pb, se


def test_negative_correlation_all_dpp_samplers():
    cells_per = ((0.0, 0.12), (0.5, 0.62))
    cells_gau = ((-1.0, -0.35), (0.35, 1.0))
    cases = [
        (lambda r, N=N: sm.sample_cue(N, r), cells_per, N, 20 + N)
        for N in (2, 5)
    ] + [
        (lambda r, N=N: sm.sample_hermite_ensemble(GAUSS, N, r), cells_gau, N, 30 + N)
        for N in (2, 5)
    ] + [
        (lambda r, N=N: sm.sample_chain_rule(dq.spectral_basis(SOB1, N), r), cells_per, N, 40 + N)
        for N in (2, 5)
    ]
    for sampler, (ca, cb), N, seed in cases:
        sets = [n.points.ravel() for n in draws(sampler, 100_000, seed)]
        diff, se = _occupancy(sets, ca, cb)
        assert diff <= 3 * se, (N, diff, se)


def test_det_eigenfunction_matrix_nonzero():
    cases = [
        (SOB1, 4, lambda r: sm.sample_cue(4, r)),
        (GAUSS, 4, lambda r: sm.sample_hermite_ensemble(GAUSS, 4, r)),
        (dq.korobov_spec(1, 2), 4, None),
    ]
    for spec, N, sampler in cases:
        basis = dq.spectral_basis(spec, N)
        if sampler is None:
            sampler = lambda r: sm.sample_chain_rule(basis, r)
        for n in draws(sampler, 1_000, 55):
            E = basis.eval_matrix(n.points)
            E = E / np.linalg.norm(E, axis=1, keepdims=True)
            assert abs(np.linalg.det(E)) > 1e-12


def test_rejection_stall_raises(monkeypatch):
    monkeypatch.setattr(sm, "_MAX_PROPOSALS_PER_STEP", 32)
    basis = dq.spectral_basis(dq.korobov_spec(1, 2), 6)
    with pytest.raises(RejectionStalled):
        # with a 32-proposal budget some step stalls almost surely
        for seed in range(50):
            sm.sample_chain_rule(basis, sm.rng_stream(seed))


def test_dpp_nodes_dispatch():
    assert sm.dpp_nodes(SOB1, 3, sm.rng_stream(0)).provenance == "CUE"
    assert sm.dpp_nodes(GAUSS, 3, sm.rng_stream(0)).provenance == "HermiteEnsemble"
    assert sm.dpp_nodes(dq.korobov_spec(1, 2), 3, sm.rng_stream(0)).provenance == "ChainRule"


def test_nodeset_csv_round_trip(tmp_path):
    nodes = sm.dpp_nodes(dq.korobov_spec(1, 2), 4, sm.rng_stream(77))
    path = tmp_path / "nodes.csv"
    path.write_text(sm.nodeset_to_csv(nodes))
    back = sm.nodeset_from_csv(path.read_text())
    assert np.array_equal(back.points, nodes.points)
    assert back.provenance == nodes.provenance
    assert back.seed == nodes.seed
