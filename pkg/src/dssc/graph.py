"""Affinity-graph and transition-matrix value types.

An affinity graph is a symmetric nonnegative matrix W whose entry (i, j)
weights the edge between nodes i and j.  Affinities derived from
self-expressive coefficients have a zero diagonal; diffused affinities may
carry self-loop mass, so the diagonal is not constrained here.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError

_SYMMETRY_RTOL = 1e-10
_NEGATIVITY_TOL = 1e-12


@dataclass
class AffinityGraph:
    """Symmetric nonnegative affinity matrix with cached degree data.

    ``meta`` carries provenance and convergence information attached by the
    operations that produced the graph (solver iterations, diffusion steps,
    final residuals).
    """

    W: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DimensionError(f"affinity matrix must be square, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise ParameterError("affinity matrix contains non-finite entries")
        scale = np.abs(W).max() if W.size else 0.0
        if not np.allclose(W, W.T, rtol=0.0, atol=_SYMMETRY_RTOL * max(scale, 1.0)):
            raise ParameterError("affinity matrix is not symmetric")
        if W.size and W.min() < -_NEGATIVITY_TOL * max(scale, 1.0):
            raise ParameterError("affinity matrix has negative entries")
        self.W = W

    @property
    def num_nodes(self) -> int:
        return self.W.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        """Row sums d_i = sum_k W[i, k]."""
        return self.W.sum(axis=1)

    @property
    def volume(self) -> float:
        """Total edge mass vol(V) = sum_i d_i."""
        return float(self.W.sum())


@dataclass
class TransitionMatrix:
    """Row-stochastic random-walk matrix P = D^{-1} W.

    Rows of zero-degree nodes are replaced by self-loops (P[i, i] = 1) and
    flagged in ``isolated``.
    """

    P: np.ndarray
    isolated: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionError(f"transition matrix must be square, got shape {P.shape}")
        row_sums = P.sum(axis=1)
        if P.size and (P.min() < 0.0 or np.abs(row_sums - 1.0).max() > 1e-12):
            raise ParameterError("transition matrix rows must be nonnegative and sum to 1")
        self.P = P
        self.isolated = np.asarray(self.isolated, dtype=bool)


def affinity_matrix(W) -> np.ndarray:
    """Coerce an ``AffinityGraph`` or array to a validated ndarray."""
    if isinstance(W, AffinityGraph):
        return W.W
    return AffinityGraph(W).W


def walk_matrix(P) -> np.ndarray:
    """Coerce a ``TransitionMatrix`` or array to an ndarray."""
    if isinstance(P, TransitionMatrix):
        return P.P
    return np.asarray(P, dtype=np.float64)
