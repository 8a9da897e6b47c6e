"""Acceptance suite: one test per top-level criterion.

Each test is self-contained, regenerates its own deterministic instances,
and asserts the stated tolerance; the slower end-to-end criteria also
assert their runtime budgets.
"""

import time
from dataclasses import replace

import numpy as np
import pytest
from conftest import brute_force_error, planted_partition, random_substochastic

from dssc import (
    DiffusionConfig,
    SscConfig,
    SpectralConfig,
    SyntheticSpec,
    accumulate_diffuse,
    affinity_from_coefficients,
    clustering_error,
    diffuse_affinity,
    generate_synthetic,
    lcdp_diffuse,
    ncut,
    normalize_substochastic,
    pagerank_diffuse,
    power_diffuse,
    run_corruption_sweep,
    self_expression_objective,
    solve_ssc,
    spectral_cluster,
    stationary_distribution,
    tpg_closed_form,
    tpg_diffuse,
    transition_matrix,
)
from dssc.cli import main as cli_main
from dssc.dataset import save_matrix


def oracle_instances():
    """50 deterministic symmetric sub-stochastic matrices, N in 2..30."""
    rng = np.random.default_rng(20260101)
    sizes = [2, 30] + [int(rng.integers(2, 31)) for _ in range(48)]
    return [random_substochastic(n, rng) for n in sizes]


def test_criterion_01_tpg_iteration_matches_kronecker_oracle():
    started = time.perf_counter()
    # tol below default so the early-stop tail is far inside the 1e-8 budget
    config = DiffusionConfig(tol=1e-12)
    for W in oracle_instances():
        iterated = tpg_diffuse(W, config)
        closed = tpg_closed_form(W)
        assert np.linalg.norm(iterated.W - closed.W) <= 1e-8
    assert time.perf_counter() - started < 30.0


def test_criterion_02_tpg_fixed_point_identity():
    config = DiffusionConfig(tol=1e-12)
    for W in oracle_instances():
        A = tpg_diffuse(W, config).W
        n = W.shape[0]
        assert np.linalg.norm(A - (W @ A @ W.T + np.eye(n))) <= 1e-8


def test_criterion_03_accumulated_series_matches_linear_solve():
    rng = np.random.default_rng(20260103)
    for _ in range(30):
        n = int(rng.integers(2, 31))
        W = random_substochastic(n, rng, max_row=0.8)
        partial = accumulate_diffuse(W, 200)
        limit = np.linalg.solve(np.eye(n) - W, np.eye(n))
        assert np.linalg.norm(partial - limit) <= 1e-10


def test_criterion_04_all_variants_preserve_blocks_exactly():
    rng = np.random.default_rng(20260104)
    for _ in range(100):
        n = int(rng.integers(4, 40))
        split = int(rng.integers(1, n))
        W = np.zeros((n, n))
        W[:split, :split] = random_substochastic(split, rng)
        W[split:, split:] = random_substochastic(n - split, rng)
        off = np.zeros((n, n), dtype=bool)
        off[:split, split:] = True
        off[split:, :split] = True

        P = transition_matrix(W).P
        outputs = [
            tpg_diffuse(W, DiffusionConfig()).W,
            accumulate_diffuse(W, 30),
            accumulate_diffuse(W, None),
            power_diffuse(W, P, 3),
            lcdp_diffuse(W, P, 2),
            pagerank_diffuse(W, P, 0.85),
        ]
        for out in outputs:
            assert np.all(out[off] == 0.0)


def test_criterion_05_clean_data_clusters_perfectly():
    started = time.perf_counter()
    spec = SyntheticSpec()
    for seed in range(10):
        ds = generate_synthetic(spec, seed=seed)
        raw = affinity_from_coefficients(solve_ssc(ds.data, SscConfig()))
        clusterer = SpectralConfig(num_clusters=5, seed=seed)
        ssc_labels = spectral_cluster(raw, clusterer).labels
        assert clustering_error(ssc_labels, ds.labels)[0] == 0.0
        diffused = diffuse_affinity(raw, DiffusionConfig())
        dssc_labels = spectral_cluster(diffused, clusterer).labels
        assert clustering_error(dssc_labels, ds.labels)[0] == 0.0
    assert time.perf_counter() - started < 300.0


def test_criterion_06_corruption_sweep_trend():
    started = time.perf_counter()
    levels = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    report = run_corruption_sweep(levels, range(10))
    for i in range(len(levels)):
        assert report.dssc_mean[i] <= report.ssc_mean[i] + 0.02 + 1e-12
    noisy = np.arange(1, len(levels))
    strictly_better = int(np.sum(report.dssc_mean[noisy] < report.ssc_mean[noisy] - 1e-12))
    assert strictly_better >= 3
    assert time.perf_counter() - started < 1800.0


def test_criterion_07_random_walk_identities():
    rng = np.random.default_rng(20260107)
    for _ in range(100):
        n = int(rng.integers(3, 40))
        while True:
            W = rng.uniform(size=(n, n))
            W = 0.5 * (W + W.T)
            np.fill_diagonal(W, 0.0)
            if np.all(W.sum(axis=1) > 0.0):
                break
        pi = stationary_distribution(W)
        P = transition_matrix(W).P
        assert np.abs(P.T @ pi - pi).max() <= 1e-10

        labels = (rng.uniform(size=n) < 0.5).astype(int)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        edge, walk = ncut(W, labels)
        assert abs(edge - walk) <= 1e-12


def test_criterion_08_diffusion_lowers_planted_partition_ncut():
    # the diffused graph keeps its accumulated self-loop mass (a lazy
    # random walk retains more probability inside each block), and is
    # renormalized before the cut is measured
    scale = DiffusionConfig.substochastic_scale
    wins = 0
    for seed in range(100):
        rng = np.random.default_rng([20260108, seed])
        W, labels = planted_partition(60, 0.5, 0.05, rng)
        base_edge, _ = ncut(W, labels)
        diffused = tpg_diffuse(normalize_substochastic(W, scale), DiffusionConfig())
        renormalized = normalize_substochastic(diffused.W, scale)
        diffused_edge, _ = ncut(renormalized, labels)
        wins += diffused_edge < base_edge
    assert wins >= 95


def test_criterion_09_admm_objective_matches_convex_oracle():
    import cvxpy as cp

    rng = np.random.default_rng(20260109)
    cases = []
    for error_norm in ("frobenius", "l1"):
        for (D, N) in ((6, 8), (10, 12), (5, 12)):
            cases.append((rng.normal(size=(D, N)), error_norm))
    # a duplicated-column instance as well
    X = rng.normal(size=(7, 9))
    X[:, 1] = X[:, 0]
    cases.append((X, "frobenius"))

    config = SscConfig(primal_tol=1e-9, dual_tol=1e-9, max_iters=60000)
    for X, error_norm in cases:
        result = solve_ssc(X, replace(config, error_norm=error_norm))
        assert result.converged
        assert np.all(np.diag(result.C) == 0.0)
        Xn = X / np.linalg.norm(X, axis=0, keepdims=True)
        N = X.shape[1]
        C = cp.Variable((N, N))
        R = Xn - Xn @ C
        if error_norm == "frobenius":
            err = 0.5 * cp.sum_squares(R)
        else:
            err = cp.sum(cp.abs(R))
        problem = cp.Problem(
            cp.Minimize(cp.sum(cp.abs(C)) + result.weight * err), [cp.diag(C) == 0]
        )
        problem.solve()
        ours = self_expression_objective(Xn, result.C, result.weight, error_norm)
        reference = self_expression_objective(Xn, np.asarray(C.value), result.weight,
                                              error_norm)
        assert abs(ours - reference) <= 1e-4 * abs(reference)


def test_criterion_10_clustering_error_matches_enumeration():
    rng = np.random.default_rng(20260110)
    for _ in range(1000):
        n = int(rng.integers(2, 31))
        predicted = rng.integers(0, int(rng.integers(1, 7)), size=n)
        truth = rng.integers(0, int(rng.integers(1, 7)), size=n)
        fast = clustering_error(predicted, truth)[0]
        assert fast == pytest.approx(brute_force_error(predicted, truth), abs=1e-12)


def test_cluster_command_on_user_supplied_matrix(tmp_path, capsys):
    # arbitrary dense matrix, not from the generator
    rng = np.random.default_rng(20260111)
    X = rng.uniform(-1.0, 1.0, size=(40, 180))
    path = tmp_path / "user.csv"
    save_matrix(X, path)
    code = cli_main(["cluster", "--input", str(path), "--clusters", "4",
                     "--out", str(tmp_path / "run")])
    capsys.readouterr()
    assert code == 0
    assert (tmp_path / "run" / "labels.txt").exists()
