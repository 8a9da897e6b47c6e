"""Shared random-instance builders for the test suite."""

import itertools

import numpy as np


def random_substochastic(n, rng, max_row=0.9):
    """Random symmetric nonnegative zero-diagonal W, max row sum <= max_row."""
    W = rng.uniform(0.0, 1.0, size=(n, n))
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    sums = W.sum(axis=1)
    if sums.max() > 0.0:
        W *= rng.uniform(0.3, 1.0) * max_row / sums.max()
    return W


def random_affinity(n, rng, density=1.0):
    """Random symmetric nonnegative graph with no isolated nodes."""
    while True:
        W = rng.uniform(0.0, 1.0, size=(n, n))
        if density < 1.0:
            W *= rng.uniform(size=(n, n)) < density
        W = 0.5 * (W + W.T)
        np.fill_diagonal(W, 0.0)
        if np.all(W.sum(axis=1) > 0.0):
            return W


def planted_partition(n, p_in, p_out, rng):
    """Two-block 0/1 graph: edge prob p_in inside blocks, p_out across."""
    labels = np.repeat([0, 1], n // 2)
    if labels.size < n:
        labels = np.concatenate([labels, [1] * (n - labels.size)])
    prob = np.where(labels[:, np.newaxis] == labels[np.newaxis, :], p_in, p_out)
    while True:
        U = np.triu(rng.uniform(size=(n, n)), 1)
        W = (U < np.triu(prob, 1)) * 1.0
        W = W + W.T
        if np.all(W.sum(axis=1) > 0.0):
            return W, labels


def brute_force_error(predicted, truth):
    """Clustering error by enumerating every one-to-one label matching."""
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    pred_values, pred_idx = np.unique(predicted, return_inverse=True)
    true_values, true_idx = np.unique(truth, return_inverse=True)
    k = max(pred_values.size, true_values.size)
    table = np.zeros((k, k), dtype=np.int64)
    np.add.at(table, (pred_idx, true_idx), 1)
    best = 0
    for perm in itertools.permutations(range(k)):
        best = max(best, sum(table[i, perm[i]] for i in range(k)))
    return 1.0 - best / predicted.size
