"""Co-clustering: block approximation, objective, alternating fit."""

import itertools

import numpy as np
import pytest

from hashbridge.cocluster import (
    CoClusterConfig,
    assign_rows,
    ccbr_fit,
    choose_restart,
    cluster_weights,
    dump_coclusters,
    mbi_approximation,
    objective,
)
from hashbridge.errors import InfeasibleConfig
from hashbridge.metrics import nmi
from hashbridge.synth import generate_block_matrix


def cfg_for(l_row, l_col, **over):
    base = dict(l_row=l_row, l_col=l_col, lambda_t=0.0, lambda_o=0.0, seed=0)
    base.update(over)
    return CoClusterConfig(**base)


def test_config_validation():
    with pytest.raises(InfeasibleConfig):
        CoClusterConfig(l_row=0, l_col=2)
    with pytest.raises(ValueError):
        CoClusterConfig(l_row=2, l_col=2, lambda_t=-1.0)
    with pytest.raises(ValueError):
        CoClusterConfig(l_row=2, l_col=2, max_iter=0)


def test_mbi_hand_block_means():
    H = np.array([[1.0, 2.0], [3.0, 4.0]])
    approx = mbi_approximation(H, np.array([0, 1]), np.array([0, 0]))
    assert np.allclose(approx, [[1.5, 1.5], [3.5, 3.5]])


def test_mbi_block_constant_exact():
    H, rho, gamma = generate_block_matrix(8, 6, 2, 3, noise_sigma=0.0, seed=1)
    assert np.allclose(mbi_approximation(H, rho, gamma), H)


def test_mbi_single_block_is_global_mean():
    H = np.arange(6, dtype=float).reshape(2, 3)
    approx = mbi_approximation(H, np.zeros(2, int), np.zeros(3, int))
    assert np.allclose(approx, H.mean())


def test_objective_zero_on_perfect_blocks():
    H, rho, gamma = generate_block_matrix(6, 6, 2, 2, noise_sigma=0.0, seed=0)
    assert objective(H, None, None, rho, gamma, cfg_for(2, 2)) == 0.0


def test_objective_matches_direct_formula():
    rng = np.random.default_rng(2)
    H = rng.random((4, 4))
    T = rng.random((4, 5))
    O = rng.random((4, 4))
    O = (O + O.T) / 2
    np.fill_diagonal(O, 0.0)
    rho = np.array([0, 1, 0, 1])
    gamma = np.array([1, 0, 0, 1])
    cfg = cfg_for(2, 2, lambda_t=2.0, lambda_o=0.5)
    want = ((H - mbi_approximation(H, rho, gamma)) ** 2).sum() / H.size
    t_hat = np.zeros_like(T)
    o_hat = np.zeros_like(O)
    for c in range(2):
        t_hat[gamma == c] = T[gamma == c].mean(axis=0)
        o_hat[rho == c] = O[rho == c].mean(axis=0)
    want += 2.0 * ((T - t_hat) ** 2).sum() / T.size
    want += 0.5 * ((O - o_hat) ** 2).sum() / O.size
    assert objective(H, T, O, rho, gamma, cfg) == pytest.approx(want, rel=1e-12)


def test_objective_label_permutation_invariant():
    rng = np.random.default_rng(4)
    H = rng.random((8, 5))
    rho = rng.integers(0, 3, size=8)
    gamma = rng.integers(0, 2, size=5)
    cfg = cfg_for(3, 2)
    base = objective(H, None, None, rho, gamma, cfg)
    perm = np.array([2, 0, 1])
    assert objective(H, None, None, perm[rho], gamma, cfg) == pytest.approx(base)


def test_planted_recovery_and_bruteforce_optimum():
    H, rows, cols = generate_block_matrix(6, 6, 2, 2, noise_sigma=0.0, seed=3)
    res = choose_restart(H, None, None, cfg_for(2, 2), 16)
    assert nmi(list(rows), list(res.rho)) == 1.0
    assert nmi(list(cols), list(res.gamma)) == 1.0
    best = min(
        objective(H, None, None, np.array(r), np.array(g), cfg_for(2, 2))
        for r in itertools.product(range(2), repeat=6)
        for g in itertools.product(range(2), repeat=6))
    assert res.objective_trace[-1] == pytest.approx(best, abs=1e-12)


def test_trace_non_increasing_random_instances():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        n_h = int(rng.integers(4, 30))
        n_t = int(rng.integers(3, 15))
        H = rng.random((n_h, n_t))
        cfg = cfg_for(min(3, n_h), min(3, n_t), lambda_t=1.0, lambda_o=1.0,
                      seed=seed)
        T = rng.random((n_t, 6))
        O = rng.random((n_h, n_h))
        O = (O + O.T) / 2
        np.fill_diagonal(O, 0.0)
        res = ccbr_fit(H, T, O, cfg)
        trace = res.objective_trace
        assert all(trace[i + 1] <= trace[i] for i in range(len(trace) - 1))
        assert res.n_iter <= cfg.max_iter


def test_all_clusters_realized():
    rng = np.random.default_rng(9)
    H = rng.random((10, 8))
    res = ccbr_fit(H, None, None, cfg_for(4, 3, seed=9))
    assert set(res.rho) == {0, 1, 2, 3}
    assert set(res.gamma) == {0, 1, 2}


def test_tol_zero_reaches_fixed_point():
    rng = np.random.default_rng(12)
    H = rng.random((12, 7))
    cfg = cfg_for(3, 2, tol=0.0, seed=12)
    res = ccbr_fit(H, None, None, cfg)
    # at the fixed point one more sweep changes nothing
    again = assign_rows(H, None, res.rho, res.gamma, cfg)
    assert np.array_equal(again, res.rho)


def test_row_step_reduces_to_kmeans_assignment():
    rng = np.random.default_rng(6)
    H = rng.random((9, 4))
    rho = rng.integers(0, 3, size=9)
    gamma = np.arange(4)  # identity: one column per cluster
    cfg = cfg_for(3, 4)
    got = assign_rows(H, None, rho, gamma, cfg)
    means = np.stack([H[rho == c].mean(axis=0) for c in range(3)])
    want = np.argmin(((H[:, None, :] - means[None]) ** 2).sum(axis=2), axis=1)
    assert np.array_equal(got, want)


def test_same_seed_identical_result():
    rng = np.random.default_rng(15)
    H = rng.random((14, 9))
    a = ccbr_fit(H, None, None, cfg_for(3, 3, seed=5))
    b = ccbr_fit(H, None, None, cfg_for(3, 3, seed=5))
    assert np.array_equal(a.rho, b.rho)
    assert np.array_equal(a.gamma, b.gamma)
    assert a.objective_trace == b.objective_trace


def test_shape_validation():
    H = np.zeros((4, 3))
    with pytest.raises(ValueError):
        ccbr_fit(H, np.zeros((2, 5)), None, cfg_for(2, 2))
    with pytest.raises(ValueError):
        ccbr_fit(H, None, np.zeros((3, 3)), cfg_for(2, 2))
    with pytest.raises(InfeasibleConfig):
        ccbr_fit(H, None, None, cfg_for(5, 2))


def test_cooccurrence_pulls_twins_together():
    # rows 0,1 have identical H rows; both co-occur with row 2, so their
    # co-occurrence rows match and the O term groups them
    H = np.ones((4, 3))
    O = np.zeros((4, 4))
    O[0, 2] = O[2, 0] = 10.0
    O[1, 2] = O[2, 1] = 10.0
    for seed in range(10):
        res = choose_restart(H, None, O, cfg_for(2, 2, lambda_o=1.0, seed=seed), 8)
        assert res.rho[0] == res.rho[1]


def test_cooccurrence_term_improves_recovery():
    # H carries no signal; O has within-group co-occurrence blocks
    truth = [0, 0, 0, 1, 1, 1]
    O = np.zeros((6, 6))
    for i in range(3):
        for j in range(3):
            if i != j:
                O[i, j] = 5.0
                O[i + 3, j + 3] = 5.0
    with_o, without = [], []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        H = np.ones((6, 3)) + rng.normal(0, 0.01, size=(6, 3))
        a = choose_restart(H, None, O, cfg_for(2, 2, lambda_o=1.0, seed=seed), 4)
        b = choose_restart(H, None, O, cfg_for(2, 2, lambda_o=0.0, seed=seed), 4)
        with_o.append(nmi(truth, list(a.rho)))
        without.append(nmi(truth, list(b.rho)))
    assert np.mean(with_o) > np.mean(without)


def test_choose_restart_single_equals_fit():
    rng = np.random.default_rng(20)
    H = rng.random((8, 6))
    cfg = cfg_for(2, 2, seed=3)
    one = choose_restart(H, None, None, cfg, 1)
    direct = ccbr_fit(H, None, None, cfg)
    assert np.array_equal(one.rho, direct.rho)
    assert one.objective_trace == direct.objective_trace


def test_choose_restart_monotone_in_restarts():
    rng = np.random.default_rng(21)
    for _ in range(10):
        H = rng.random((12, 8))
        cfg = cfg_for(3, 3, seed=int(rng.integers(100)))
        best1 = choose_restart(H, None, None, cfg, 1).objective_trace[-1]
        best8 = choose_restart(H, None, None, cfg, 8).objective_trace[-1]
        assert best8 <= best1


def one_hot_rows_instance(seed):
    """Each row cluster owns a column block; rows are one-hot inside it.

    Orthogonal column supports tie large parts of the objective, which
    is exactly the landscape where a single random start gets stuck.
    """
    rng = np.random.default_rng(seed)
    rows = np.repeat(np.arange(3), 6)
    cols = np.repeat(np.arange(3), 3)
    rng.shuffle(rows)
    rng.shuffle(cols)
    H = np.zeros((18, 9))
    for i, r in enumerate(rows):
        owned = np.where(cols == r)[0]
        H[i, rng.choice(owned)] = 1.0
    return H, rows, cols


def test_restarts_help_on_tie_heavy_instances():
    gains = []
    for seed in range(20):
        H, rows, cols = one_hot_rows_instance(seed)
        cfg = cfg_for(3, 3, seed=seed)
        one = choose_restart(H, None, None, cfg, 1)
        eight = choose_restart(H, None, None, cfg, 8)
        gains.append(nmi(list(rows), list(eight.rho))
                     - nmi(list(rows), list(one.rho)))
    assert np.mean(gains) > 0.0


def test_cluster_weights():
    rho = np.array([0, 0, 1])
    w = cluster_weights(rho, 2)
    assert np.allclose(w, [0.5, 0.5, 1.0])
    w = cluster_weights(rho, 2, row_counts=[3, 1, 2])
    assert np.allclose(w, [0.75, 0.25, 1.0])


def test_dump_coclusters(tmp_path):
    rng = np.random.default_rng(1)
    H = rng.random((5, 4))
    res = ccbr_fit(H, None, None, cfg_for(2, 2, seed=1))
    out = tmp_path / "cc.txt"
    dump_coclusters(res, out)
    text = out.read_text()
    assert "rho:" in text and "gamma:" in text and "objective_trace:" in text
