"""SVT and core-update kernels against closed forms and direct solves."""

import numpy as np
import pytest

from trtc import (
    svt,
    ridge_solve,
    core_update_olrf,
    core_update_llrf,
    reconstruct,
    subchain,
    gamma_unfold,
    delta_unfold,
)


def rand_instance(rng, order_lo=3, order_hi=5):
    order = int(rng.integers(order_lo, order_hi))
    shape = tuple(int(v) for v in rng.integers(2, 5, size=order))
    ranks = tuple(int(v) for v in rng.integers(2, 4, size=order))
    cores = [
        rng.standard_normal((ranks[i], shape[i], ranks[(i + 1) % order]))
        for i in range(order)
    ]
    x = rng.standard_normal(shape)
    n = int(rng.integers(1, order + 1))
    return cores, x, n


def prox_objective(m, a, beta):
    return beta * np.linalg.svd(m, compute_uv=False).sum() + 0.5 * np.linalg.norm(m - a) ** 2


def test_svt_diagonal_hand_case():
    res = svt(np.diag([3.0, 1.0]), 2.0)
    np.testing.assert_allclose(res.matrix, np.diag([1.0, 0.0]), atol=1e-12)
    assert res.effective_rank == 1
    assert abs(res.nuclear_norm_after - 1.0) < 1e-12


def test_svt_zero_threshold_is_identity():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 4))
    res = svt(a, 0.0)
    np.testing.assert_allclose(res.matrix, a, atol=1e-12)
    assert res.effective_rank == 4


def test_svt_kills_matrix_above_top_singular_value():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((5, 5))
    smax = np.linalg.svd(a, compute_uv=False)[0]
    res = svt(a, smax * 1.0001)
    np.testing.assert_array_equal(res.matrix, np.zeros((5, 5)))
    assert res.effective_rank == 0
    assert res.nuclear_norm_after == 0.0


def test_svt_is_prox_minimizer_by_probing():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((8, 5))
    beta = 0.3
    m = svt(a, beta).matrix
    f0 = prox_objective(m, a, beta)
    for _ in range(200):
        p = m + rng.standard_normal((8, 5)) * rng.choice([1e-3, 1e-2, 1e-1])
        assert prox_objective(p, a, beta) >= f0 - 1e-12


def test_svt_nonexpansive():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal((6, 7))
        b = rng.standard_normal((6, 7))
        beta = float(rng.uniform(0.0, 2.0))
        d = np.linalg.norm(svt(a, beta).matrix - svt(b, beta).matrix)
        assert d <= np.linalg.norm(a - b) + 1e-10


def test_svt_negative_threshold_raises():
    with pytest.raises(ValueError):
        svt(np.eye(2), -0.1)


def test_ridge_solve_identity_and_scaled_identity():
    rng = np.random.default_rng(4)
    b = rng.standard_normal((3, 5))
    np.testing.assert_allclose(ridge_solve(b, np.eye(5)), b, atol=1e-12)
    np.testing.assert_allclose(ridge_solve(b, 4.0 * np.eye(5)), b / 4.0, atol=1e-12)


def test_ridge_solve_residual_on_random_spd():
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = rng.standard_normal((6, 6))
        a = m @ m.T + 6 * np.eye(6)
        b = rng.standard_normal((4, 6))
        x = ridge_solve(b, a)
        assert np.linalg.norm(x @ a - b) <= 1e-10 * np.linalg.norm(b)


def test_ridge_solve_rejects_bad_systems():
    b = np.ones((2, 3))
    with pytest.raises(ValueError):
        ridge_solve(b, np.arange(9.0).reshape(3, 3))  # not symmetric
    with pytest.raises(np.linalg.LinAlgError):
        ridge_solve(b, np.full((3, 3), np.inf))


def test_core_update_olrf_zero_lambda_closed_form():
    rng = np.random.default_rng(6)
    cores, x, n = rand_instance(rng)
    g0 = cores[n - 1]
    mu = 1.7
    aux = [rng.standard_normal(g0.shape) for _ in range(3)]
    duals = [rng.standard_normal(g0.shape) for _ in range(3)]
    g = core_update_olrf(x, cores, aux, duals, n, 0.0, mu)
    want = sum(aux[i] + duals[i] / mu for i in range(3)) / 3.0
    np.testing.assert_allclose(g, want, atol=1e-12)


def test_core_update_llrf_zero_lambda_closed_form():
    rng = np.random.default_rng(7)
    cores, x, n = rand_instance(rng)
    g0 = cores[n - 1]
    mu = 0.9
    latent = [rng.standard_normal(g0.shape) for _ in range(3)]
    dual = rng.standard_normal(g0.shape)
    g = core_update_llrf(x, cores, latent, dual, n, 0.0, mu)
    np.testing.assert_allclose(g, sum(latent) + dual / mu, atol=1e-12)


def normal_system(x, cores, n, lam, extra):
    # direct assembly of G (lam Q Q^T + extra) = lam Dx Q^T + rhs_terms
    q = delta_unfold(subchain(cores, n), 2).T
    a = lam * (q @ q.T) + extra
    dx = delta_unfold(x, n)
    return q, a, dx


def test_core_update_llrf_uses_single_mu_ridge():
    rng = np.random.default_rng(8)
    for _ in range(10):
        cores, x, n = rand_instance(rng)
        g0 = cores[n - 1]
        lam, mu = 10.0, 2.0
        latent = [rng.standard_normal(g0.shape) for _ in range(3)]
        dual = rng.standard_normal(g0.shape)
        g = core_update_llrf(x, cores, latent, dual, n, lam, mu)
        r = g0.shape[0] * g0.shape[2]
        q, a_mu, dx = normal_system(x, cores, n, lam, mu * np.eye(r))
        b = lam * dx @ q.T + mu * gamma_unfold(sum(latent), 2) + gamma_unfold(dual, 2)
        sol = np.linalg.solve(a_mu.T, b.T).T
        rel = np.linalg.norm(gamma_unfold(g, 2) - sol) / np.linalg.norm(sol)
        assert rel < 1e-10
        # a 3*mu ridge would land somewhere else entirely
        a3 = lam * (q @ q.T) + 3 * mu * np.eye(r)
        sol3 = np.linalg.solve(a3.T, b.T).T
        assert np.linalg.norm(gamma_unfold(g, 2) - sol3) / np.linalg.norm(sol3) > 1e-3


def test_core_update_olrf_uses_triple_mu_ridge():
    rng = np.random.default_rng(9)
    for _ in range(10):
        cores, x, n = rand_instance(rng)
        g0 = cores[n - 1]
        lam, mu = 10.0, 2.0
        aux = [rng.standard_normal(g0.shape) for _ in range(3)]
        duals = [rng.standard_normal(g0.shape) for _ in range(3)]
        g = core_update_olrf(x, cores, aux, duals, n, lam, mu)
        r = g0.shape[0] * g0.shape[2]
        q, a, dx = normal_system(x, cores, n, lam, 3 * mu * np.eye(r))
        b = (lam * dx @ q.T
             + mu * gamma_unfold(sum(aux), 2)
             + gamma_unfold(sum(duals), 2))
        sol = np.linalg.solve(a.T, b.T).T
        rel = np.linalg.norm(gamma_unfold(g, 2) - sol) / np.linalg.norm(sol)
        assert rel < 1e-10


def test_core_update_olrf_descends_its_objective():
    rng = np.random.default_rng(10)
    for _ in range(20):
        cores, x, n = rand_instance(rng)
        g0 = cores[n - 1]
        lam, mu = 10.0, 2.0
        aux = [rng.standard_normal(g0.shape) for _ in range(3)]
        duals = [rng.standard_normal(g0.shape) for _ in range(3)]

        def objective(g):
            cs = list(cores)
            cs[n - 1] = g
            v = 0.5 * lam * np.linalg.norm(x - reconstruct(cs)) ** 2
            for i in range(3):
                v += 0.5 * mu * np.linalg.norm(aux[i] - g + duals[i] / mu) ** 2
            return v

        g = core_update_olrf(x, cores, aux, duals, n, lam, mu)
        assert objective(g) <= objective(g0) + 1e-10


def test_core_updates_deterministic():
    rng = np.random.default_rng(11)
    cores, x, n = rand_instance(rng)
    g0 = cores[n - 1]
    aux = [rng.standard_normal(g0.shape) for _ in range(3)]
    duals = [rng.standard_normal(g0.shape) for _ in range(3)]
    a = core_update_olrf(x, cores, aux, duals, n, 10.0, 2.0)
    b = core_update_olrf(x, cores, aux, duals, n, 10.0, 2.0)
    np.testing.assert_array_equal(a, b)
    dual = rng.standard_normal(g0.shape)
    c = core_update_llrf(x, cores, aux, dual, n, 10.0, 2.0)
    d = core_update_llrf(x, cores, aux, dual, n, 10.0, 2.0)
    np.testing.assert_array_equal(c, d)
