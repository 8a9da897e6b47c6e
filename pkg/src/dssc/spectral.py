"""Spectral clustering and random-walk partition diagnostics.

Clustering embeds the nodes with the bottom eigenvectors of the
symmetric normalized Laplacian L = I - D^{-1/2} W D^{-1/2}, row-normalizes
the embedding, and runs seeded k-means restarts.  The diagnostics view the
graph as a Markov chain: the stationary distribution is proportional to
node degree, and the normalized cut of a partition equals the sum of the
cross-partition escape probabilities of a stationary random walk.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .diffusion import transition_matrix
from .errors import DegenerateGraphError, DimensionError, ParameterError
from .graph import AffinityGraph, affinity_matrix

_ZERO_ROW_TOL = 1e-12


@dataclass(frozen=True)
class SpectralConfig:
    num_clusters: int = 2
    kmeans_restarts: int = 20
    kmeans_max_iters: int = 300
    seed: int = 0
    eig_tol: float = 1e-8

    def __post_init__(self):
        if self.num_clusters < 2:
            raise ParameterError("num_clusters must be at least 2")
        if self.kmeans_restarts < 1:
            raise ParameterError("kmeans_restarts must be at least 1")
        if self.kmeans_max_iters < 1:
            raise ParameterError("kmeans_max_iters must be at least 1")
        if self.eig_tol <= 0.0:
            raise ParameterError("eig_tol must be positive")


@dataclass
class Partition:
    """Cluster labels for the graph nodes plus solver metadata."""

    labels: np.ndarray
    num_clusters: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)

    def indices(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)


@dataclass
class WalkDiagnostics:
    """Random-walk view of one node subset against its complement.

    ``escape_prob`` and ``retention_prob`` are the probabilities that a
    stationary walk of the requested length leaves or stays in the
    subset; they sum to one.
    """

    stationary: np.ndarray
    escape_prob: float
    retention_prob: float
    ncut_edge: float
    ncut_walk: float


def _labels_of(partition) -> np.ndarray:
    if isinstance(partition, Partition):
        return partition.labels
    return np.asarray(partition, dtype=np.int64)


def spectral_cluster(W, config: SpectralConfig) -> Partition:
    """Cluster the nodes of an affinity graph.

    Row-normalizes the bottom-k eigenvector embedding of the normalized
    Laplacian and keeps the best of ``kmeans_restarts`` seeded k-means
    runs (lowest within-cluster sum of squares, ties to the lower restart
    index).  Deterministic for a fixed seed.
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    k = config.num_clusters
    if k > N:
        raise ParameterError(f"cannot split {N} nodes into {k} clusters")
    if not W.any():
        raise DegenerateGraphError("affinity matrix is all zero")

    d = W.sum(axis=1)
    inv_sqrt = np.zeros_like(d)
    positive = d > 0.0
    inv_sqrt[positive] = 1.0 / np.sqrt(d[positive])
    L = np.eye(N) - inv_sqrt[:, np.newaxis] * W * inv_sqrt[np.newaxis, :]
    L = 0.5 * (L + L.T)

    eigenvalues, vectors = eigh(L, subset_by_index=[0, k - 1])
    residuals = np.linalg.norm(L @ vectors - vectors * eigenvalues[np.newaxis, :], axis=0)
    if residuals.max() > config.eig_tol:
        raise ArithmeticError(
            f"eigenpair residual {residuals.max():.3g} exceeds eig_tol {config.eig_tol:.3g}"
        )

    row_norms = np.linalg.norm(vectors, axis=1)
    zero_rows = row_norms <= _ZERO_ROW_TOL
    embedding = vectors.copy()
    embedding[~zero_rows] /= row_norms[~zero_rows, np.newaxis]

    labels, wcss, restart = _kmeans_best(
        embedding, k, config.seed, config.kmeans_restarts, config.kmeans_max_iters
    )
    return Partition(
        labels,
        num_clusters=k,
        meta={
            "eigenvalues": eigenvalues,
            "eig_residuals": residuals,
            "embedding": embedding,
            "zero_embedding_rows": zero_rows,
            "kmeans_wcss": wcss,
            "kmeans_restart": restart,
        },
    )


def _kmeans_best(points, k, seed, restarts, max_iters):
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        labels, wcss = _kmeans_once(points, k, rng, max_iters)
        if best is None or wcss < best[1]:
            best = (labels, wcss, r)
    return best


def _kmeans_once(points, k, rng, max_iters):
    N = points.shape[0]
    centers = points[_plusplus_init(points, k, rng)].copy()
    labels = np.full(N, -1, dtype=np.int64)
    for _ in range(max_iters):
        dist2 = _sq_distances(points, centers)
        new_labels = np.argmin(dist2, axis=1)
        # refill empty clusters with the currently worst-fit points
        counts = np.bincount(new_labels, minlength=k)
        if np.any(counts == 0):
            nearest = dist2[np.arange(N), new_labels]
            order = np.argsort(-nearest, kind="stable")
            cursor = 0
            for c in np.flatnonzero(counts == 0):
                while counts[new_labels[order[cursor]]] <= 1:
                    cursor += 1
                moved = order[cursor]
                counts[new_labels[moved]] -= 1
                new_labels[moved] = c
                counts[c] += 1
                cursor += 1
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
    dist2 = _sq_distances(points, centers)
    wcss = float(dist2[np.arange(N), labels].sum())
    return labels, wcss


def _plusplus_init(points, k, rng):
    N = points.shape[0]
    chosen = [int(rng.integers(N))]
    d2 = _sq_distances(points, points[chosen]).ravel()
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            candidate = int(rng.integers(N))
        else:
            candidate = int(rng.choice(N, p=d2 / total))
        chosen.append(candidate)
        d2 = np.minimum(d2, _sq_distances(points, points[[candidate]]).ravel())
    return np.asarray(chosen)


def _sq_distances(points, centers):
    d2 = (
        np.sum(points**2, axis=1)[:, np.newaxis]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[np.newaxis, :]
    )
    return np.maximum(d2, 0.0)


def stationary_distribution(W) -> np.ndarray:
    """Stationary distribution pi_i = d_i / vol(V) of the random walk.

    Verified against the eigenvector identity P^T pi = pi before
    returning.
    """
    W = affinity_matrix(W)
    d = W.sum(axis=1)
    vol = d.sum()
    if vol <= 0.0:
        raise DegenerateGraphError("graph has zero volume")
    pi = d / vol
    P = transition_matrix(W).P
    drift = np.abs(P.T @ pi - pi).max()
    if drift > 1e-10:
        raise ArithmeticError(f"stationary identity violated: drift {drift:.3g}")
    return pi


def _as_index_set(members, N):
    members = np.asarray(members)
    if members.dtype == bool:
        if members.shape != (N,):
            raise DimensionError(f"membership mask must have shape ({N},)")
        return np.flatnonzero(members)
    members = members.astype(np.int64)
    if members.size and (members.min() < 0 or members.max() >= N):
        raise ParameterError(f"node indices must lie in [0, {N})")
    return np.unique(members)


def partition_transition_prob(W, source, target, steps: int = 1) -> float:
    """Probability that a stationary walk starting in ``source`` is in
    ``target`` after ``steps`` steps.

    For a single step this is the exact edge-mass ratio
    sum_{i in source, j in target} w_ij / vol(source); for longer walks
    the multi-step transition matrix is weighted by the stationary
    distribution restricted to the source set.
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    source = _as_index_set(source, N)
    target = _as_index_set(target, N)
    if source.size == 0 or target.size == 0:
        raise ParameterError("both node sets must be non-empty")
    if np.intersect1d(source, target).size:
        raise ParameterError("node sets must be disjoint")
    if steps < 1:
        raise ParameterError(f"step count must be at least 1, got {steps}")
    if steps == 1:
        vol_source = W[source].sum()
        if vol_source <= 0.0:
            raise DegenerateGraphError("source set has zero volume")
        return float(W[np.ix_(source, target)].sum() / vol_source)
    pi = stationary_distribution(W)
    Pt = np.linalg.matrix_power(transition_matrix(W).P, steps)
    weight = pi[source].sum()
    if weight <= 0.0:
        raise DegenerateGraphError("source set has zero stationary mass")
    return float(pi[source] @ Pt[np.ix_(source, target)].sum(axis=1) / weight)


def ncut(W, partition) -> tuple[float, float]:
    """Normalized cut of a partition, in edge and random-walk form.

    Edge form sums cut(c, complement) / vol(c) over the clusters; walk
    form sums the one-step escape probabilities.  The two are equal up to
    rounding.  For a 2-way partition this is the classical
    (1/vol(A) + 1/vol(B)) * cut(A, B).
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    labels = _labels_of(partition)
    if labels.shape != (N,):
        raise DimensionError(f"labels shape {labels.shape} does not match {N} nodes")
    values = np.unique(labels)
    if values.size < 2:
        raise ParameterError("partition must have at least two non-empty clusters")
    all_nodes = np.arange(N)
    edge_form = 0.0
    walk_form = 0.0
    for value in values:
        inside = np.flatnonzero(labels == value)
        outside = np.setdiff1d(all_nodes, inside, assume_unique=True)
        vol = W[inside].sum()
        if vol <= 0.0:
            raise DegenerateGraphError(f"cluster {value} has zero volume")
        cut = W[np.ix_(inside, outside)].sum()
        edge_form += cut / vol
        walk_form += partition_transition_prob(W, inside, outside, steps=1)
    return float(edge_form), float(walk_form)


def walk_diagnostics(W, members, steps: int = 1) -> WalkDiagnostics:
    """Escape/retention probabilities and NCut for one subset vs the rest.

    ``members`` is a boolean mask or index set naming the subset; the
    walk runs for ``steps`` steps from the stationary distribution.
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    inside = _as_index_set(members, N)
    complement = np.setdiff1d(np.arange(N), inside, assume_unique=True)
    if inside.size == 0 or complement.size == 0:
        raise ParameterError("subset must be a proper non-empty part of the graph")
    pi = stationary_distribution(W)
    escape = partition_transition_prob(W, inside, complement, steps=steps)
    if steps == 1:
        vol_inside = W[inside].sum()
        retention = float(W[np.ix_(inside, inside)].sum() / vol_inside)
    else:
        Pt = np.linalg.matrix_power(transition_matrix(W).P, steps)
        weight = pi[inside].sum()
        retention = float(pi[inside] @ Pt[np.ix_(inside, inside)].sum(axis=1) / weight)
    two_way = np.zeros(N, dtype=np.int64)
    two_way[inside] = 1
    edge_form, walk_form = ncut(W, two_way)
    return WalkDiagnostics(
        stationary=pi,
        escape_prob=escape,
        retention_prob=retention,
        ncut_edge=edge_form,
        ncut_walk=walk_form,
    )
