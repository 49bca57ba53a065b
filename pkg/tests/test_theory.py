"""Numerical checks of the error bounds and auxiliary identities."""

import itertools
import math

import numpy as np
import pytest

import dppquad as dq
from dppquad import quadrature as qd
from dppquad import spectral as sp
from dppquad import sampling as sm
from dppquad import theory as th
from dppquad.errors import DegenerateNodes, RankDeficient

SOB1 = dq.sobolev_spec(1)
SOB3 = dq.sobolev_spec(3)
GAUSS = dq.gaussian_spec(0.5, 1.0)
KOR2 = dq.korobov_spec(1, 2)


# ---------------------------------------------------------------------------
# theorem_bound


def test_bound_vanishes_for_covered_finite_rank():
    spec = dq.truncate(SOB1, 4)
    assert th.theorem_bound(spec, 6) == 0.0
    assert th.theorem_bound(spec, 4) == 0.0


def test_bound_dominated_by_first_term_for_fast_decay():
    # once N r_N / sigma_1 is tiny the series collapses to its linear term
    N = 30
    bound = th.theorem_bound(GAUSS, N)
    basis = dq.spectral_basis(GAUSS, N + 1)
    r_n = dq.spectral_tail(GAUSS, N)
    first = 2.0 * float(basis.eigenvalues[N]) + 2.0 * N * r_n
    assert math.isclose(bound, first, rel_tol=1e-3)


def test_bound_vacuous_for_slow_decay():
    for N in (10, 30, 50):
        assert th.theorem_bound(SOB1, N) > 1e-2
        assert th.theorem_bound(SOB3, N) < th.theorem_bound(SOB1, N)


def test_bound_scales_with_integrand_norm():
    tight = th.theorem_bound(GAUSS, 20, g_norm1=1.0)
    loose = th.theorem_bound(GAUSS, 20, g_norm1=3.0)
    assert loose > tight
    with pytest.raises(ValueError):
        th.theorem_bound(GAUSS, 1)


# ---------------------------------------------------------------------------
# expected determinant ratio


def test_expected_ratio_is_one_at_full_rank():
    value, err = th.expected_cos_product(dq.truncate(SOB1, 5), 5)
    assert value == 1.0
    assert err == 0.0


def test_expected_ratio_gaussian_single_point():
    _, _, _, _, B, _ = sp.gaussian_constants(GAUSS.gamma, GAUSS.sigma)
    value, err = th.expected_cos_product(GAUSS, 1, truncation=1000)
    assert math.isclose(value, 1.0 / (1.0 - B), rel_tol=1e-10)
    assert err < 1e-12


def test_expected_ratio_at_least_one():
    for spec in (SOB1, SOB3, GAUSS, KOR2):
        for N in (1, 2, 4):
            value, _ = th.expected_cos_product(spec, N)
            assert value >= 1.0


def test_expected_ratio_auto_truncation_reports_error():
    value, err = th.expected_cos_product(SOB1, 2)
    assert err < 1e-3 * value
    with pytest.raises(ValueError):
        th.expected_cos_product(SOB1, 2, truncation=1)


# ---------------------------------------------------------------------------
# determinant-ratio statistic


def test_statistic_is_one_at_full_rank():
    spec = dq.truncate(SOB1, 3)
    basis = dq.spectral_basis(spec, 3)
    nodes = sm.NodeSet(np.array([[0.1], [0.45], [0.8]]), "Grid", 0)
    assert math.isclose(th.cos_product_statistic(basis, nodes), 1.0, rel_tol=1e-10)


def test_statistic_lower_bound():
    # subset expansion of det K only adds non-negative terms beyond the
    # leading block, so the ratio never drops below 1
    for spec, N in ((SOB1, 4), (GAUSS, 4)):
        basis = dq.spectral_basis(spec, N)
        for seed in range(50):
            nodes = sm.dpp_nodes(spec, N, sm.rng_stream(seed))
            assert th.cos_product_statistic(basis, nodes) >= 1.0 - 1e-8


def test_statistic_degenerate_inputs():
    basis = dq.spectral_basis(SOB1, 2)
    dup = sm.NodeSet(np.array([[0.3], [0.3]]), "Grid", 0)
    with pytest.raises(DegenerateNodes):
        th.cos_product_statistic(basis, dup)
    with pytest.raises(ValueError):
        th.cos_product_statistic(basis, sm.NodeSet(np.array([[0.3]]), "Grid", 0))


# ---------------------------------------------------------------------------
# principal angles


def test_principal_angles_examples():
    assert np.allclose(th.principal_angles(np.eye(4)), 1.0)
    assert np.allclose(th.principal_angles(np.zeros((3, 3))), 0.0)


def test_principal_angle_determinant_identity():
    gen = np.random.default_rng(42)
    for _ in range(100):
        q1 = np.linalg.qr(gen.standard_normal((20, 5)))[0]
        q2 = np.linalg.qr(gen.standard_normal((20, 5)))[0]
        w = q1.T @ q2
        cosines = th.principal_angles(w)
        det_sq = np.linalg.det(w) ** 2
        gram_det = np.linalg.det(w @ w.T)
        assert math.isclose(float(np.prod(cosines**2)), det_sq, rel_tol=1e-8, abs_tol=1e-12)
        assert math.isclose(gram_det, det_sq, rel_tol=1e-8, abs_tol=1e-12)


# ---------------------------------------------------------------------------
# leverage scores


def test_leverage_examples():
    tau, cross = th.leverage_scores(np.eye(2))
    assert np.allclose(tau, 1.0)
    assert np.allclose(cross, np.eye(2))
    A = np.random.default_rng(1).standard_normal((2, 5))
    tau, _ = th.leverage_scores(A)
    assert np.all(tau >= 0) and np.all(tau <= 1 + 1e-12)
    assert math.isclose(float(tau.sum()), 2.0, rel_tol=1e-12)


def test_leverage_rank1_update_matches_direct():
    gen = np.random.default_rng(7)
    for _ in range(100):
        A = gen.standard_normal((4, 12))
        i = int(gen.integers(12))
        rho = float(gen.uniform(0.05, 3.0))
        new_tau, updated = th.leverage_rank1_update(A, i, rho)
        scaled = A.copy()
        scaled[:, i] *= math.sqrt(1.0 + rho)
        direct, _ = th.leverage_scores(scaled)
        assert abs(new_tau - direct[i]) < 1e-10
        assert np.max(np.abs(updated - direct)) < 1e-10


def test_leverage_error_paths():
    with pytest.raises(RankDeficient):
        th.leverage_scores(np.array([[1.0, 2.0], [2.0, 4.0]]))
    A = np.eye(3)
    with pytest.raises(ValueError):
        th.leverage_rank1_update(A, 0, 0.0)
    with pytest.raises(ValueError):
        th.leverage_rank1_update(A, 5, 1.0)


# ---------------------------------------------------------------------------
# power-sum inequality


def test_maclaurin_examples():
    p, bound = th.maclaurin_check([1.0, 1.0, 1.0], 2)
    assert p == 3.0
    assert bound == 4.5
    p, bound = th.maclaurin_check([2.0], 1)
    assert p == bound == 2.0


def test_maclaurin_random_and_brute_force():
    gen = np.random.default_rng(3)
    for _ in range(100):
        n = int(gen.integers(2, 13))
        nu = gen.uniform(0.0, 2.0, n)
        ell = int(gen.integers(1, n + 1))
        p, bound = th.maclaurin_check(nu, ell)
        assert p <= bound * (1 + 1e-12)
        brute = sum(
            math.prod(nu[list(c)]) for c in itertools.combinations(range(n), ell)
        )
        assert math.isclose(p, brute, rel_tol=1e-10, abs_tol=1e-300)


def test_maclaurin_rejects_bad_inputs():
    with pytest.raises(ValueError):
        th.maclaurin_check([-1.0, 2.0], 1)
    with pytest.raises(ValueError):
        th.maclaurin_check([1.0], 2)


# ---------------------------------------------------------------------------
# decay-rate proxy


def test_proxy_tracks_periodic_spectrum():
    for N in (10, 100):
        sigma_next, proxy = th.eigenvalue_rate_proxy(SOB1, N)
        assert 0.1 <= sigma_next / proxy <= 10.0


def test_proxy_drift_bounded_in_two_dims():
    ratios = []
    for N in (50, 120, 260, 500):
        sigma_next, proxy = th.eigenvalue_rate_proxy(KOR2, N)
        ratios.append(math.log(sigma_next / proxy))
    assert max(ratios) - min(ratios) < 2.0


def test_proxy_exact_for_geometric_spectrum():
    # the one-dimensional gaussian spectrum is exactly geometric, so the
    # fitted proxy reproduces it to rounding
    for N in (15, 50, 150):
        sigma_next, proxy = th.eigenvalue_rate_proxy(GAUSS, N)
        assert math.isclose(sigma_next, proxy, rel_tol=1e-8)
    with pytest.raises(ValueError):
        th.eigenvalue_rate_proxy(GAUSS, 1)


# ---------------------------------------------------------------------------
# interpolation residual


def test_residual_zero_at_full_rank():
    spec = dq.truncate(SOB1, 3)
    basis = dq.spectral_basis(spec, 3)
    nodes = sm.NodeSet(np.array([[0.2], [0.5], [0.9]]), "Grid", 0)
    for n in range(3):
        assert th.interpolation_residual(basis, nodes, n) < 1e-10


def test_residual_range_and_bad_index():
    basis = dq.spectral_basis(GAUSS, 3)
    nodes = sm.dpp_nodes(GAUSS, 3, sm.rng_stream(4))
    for n in range(3):
        assert 0.0 <= th.interpolation_residual(basis, nodes, n) <= 1.0
    with pytest.raises(ValueError):
        th.interpolation_residual(basis, nodes, 3)


def test_residual_matches_single_mode_quadrature_error():
    # an integrand living on one eigenfunction has optimal squared error
    # sigma_n times the span residual of that eigenfunction
    basis = dq.spectral_basis(GAUSS, 3)
    for seed in range(100):
        nodes = sm.dpp_nodes(GAUSS, 3, sm.rng_stream(seed))
        for n in range(3):
            g = dq.eigen_integrand(((basis.indices[n], 1.0),))
            err = qd.squared_error(qd.solve_weights(GAUSS, nodes, g))
            sigma_n = float(basis.eigenvalues[n])
            resid = th.interpolation_residual(basis, nodes, n)
            assert abs(err - sigma_n * resid) < 1e-10 * (1.0 + sigma_n)
