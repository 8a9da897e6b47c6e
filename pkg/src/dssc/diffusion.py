"""Diffusion processes on affinity graphs.

The default pipeline normalizes the self-expressive affinity to a
symmetric sub-stochastic matrix and runs the tensor-product-graph
iteration

    A_1 = W,    A_{t+1} = W A_t W^T + I,

whose fixed point equals the Kronecker-system solution
vec^{-1}((I - W (x) W)^{-1} vec(I)); that closed form is kept as a small-N
testing oracle.  The classical variants (matrix powers, restarted walks,
neighborhood-restricted updates, accumulated power series) are provided
alongside for comparison.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve

from .errors import DimensionError, DivergenceError, ParameterError
from .graph import AffinityGraph, TransitionMatrix, affinity_matrix, walk_matrix
from .sparse_coder import SscConfig, affinity_from_coefficients, solve_ssc

_VARIANTS = ("power", "accumulate", "pagerank", "lcdp", "tpg")


@dataclass(frozen=True)
class DiffusionConfig:
    """Knobs of the diffusion stage.

    ``steps`` indexes the final affinity iterate (steps = 1 returns the
    input unchanged); convergence at ``tol`` relative change stops
    earlier.  ``substochastic_scale`` is the row-sum bound applied during
    normalization, kept below 1 so the series converges.
    """

    variant: str = "tpg"
    steps: int = 200
    tol: float = 1e-10
    restart_prob: float = 0.85
    restart_matrix: np.ndarray | None = None
    knn: int = 10
    substochastic_scale: float = 0.5

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ParameterError(f"variant must be one of {_VARIANTS}, got {self.variant!r}")
        if self.steps < 1:
            raise ParameterError("steps must be at least 1")
        if self.tol <= 0.0:
            raise ParameterError("tol must be positive")
        if not 0.0 < self.restart_prob < 1.0:
            raise ParameterError("restart_prob must lie in (0, 1)")
        if self.knn < 1:
            raise ParameterError("knn must be at least 1")
        if not 0.0 < self.substochastic_scale < 1.0:
            raise ParameterError("substochastic_scale must lie in (0, 1)")


def _check_substochastic(W):
    row_sums = W.sum(axis=1)
    worst = int(np.argmax(row_sums))
    if row_sums[worst] >= 1.0:
        raise DivergenceError(
            f"row {worst} has sum {row_sums[worst]:.6g} >= 1; "
            "normalize the affinity to sub-stochastic form first"
        )


def normalize_substochastic(W, scale: float, mode: str = "symmetric"):
    """Rescale an affinity so every row sum is at most ``scale`` < 1.

    ``symmetric`` mode (default) applies scale * D^{-1/2} W D^{-1/2},
    which keeps the matrix symmetric; when the degree distribution is so
    skewed that some row sum still exceeds ``scale``, the whole matrix is
    scaled down once more so the bound holds.  ``row`` mode applies
    scale * D^{-1} W and returns a plain (generally non-symmetric) array.
    Zero-degree rows pass through as zero rows.
    """
    if not 0.0 < scale < 1.0:
        raise ParameterError(f"substochastic scale must lie in (0, 1), got {scale}")
    if mode == "symmetric":
        W = affinity_matrix(W)
    elif mode == "row":
        W = W.W if isinstance(W, AffinityGraph) else np.asarray(W, dtype=np.float64)
    else:
        raise ParameterError(f"mode must be 'symmetric' or 'row', got {mode!r}")
    d = W.sum(axis=1)
    positive = d > 0.0
    if mode == "symmetric":
        inv_sqrt = np.zeros_like(d)
        inv_sqrt[positive] = 1.0 / np.sqrt(d[positive])
        out = scale * (inv_sqrt[:, np.newaxis] * W * inv_sqrt[np.newaxis, :])
        out = 0.5 * (out + out.T)  # bit-exact symmetry for downstream checks
        max_row = out.sum(axis=1).max(initial=0.0)
        if max_row > scale:
            out *= scale / max_row
        return AffinityGraph(out, meta={"normalization": "symmetric", "scale": scale})
    inv = np.zeros_like(d)
    inv[positive] = 1.0 / d[positive]
    return scale * (inv[:, np.newaxis] * W)


def transition_matrix(W) -> TransitionMatrix:
    """Row-stochastic P = D^{-1} W; zero-degree rows become self-loops."""
    W = affinity_matrix(W)
    d = W.sum(axis=1)
    isolated = d == 0.0
    inv = np.where(isolated, 0.0, 1.0 / np.where(isolated, 1.0, d))
    P = inv[:, np.newaxis] * W
    P[isolated, :] = 0.0
    P[isolated, isolated] = 1.0
    return TransitionMatrix(P, isolated)


def power_diffuse(A: np.ndarray, P, steps: int) -> np.ndarray:
    """Apply ``steps`` random-walk steps to A by repeated right-multiplication."""
    A = np.asarray(A, dtype=np.float64)
    P = walk_matrix(P)
    if steps < 0:
        raise ParameterError(f"step count must be nonnegative, got {steps}")
    if A.shape[1] != P.shape[0]:
        raise DimensionError(f"cannot multiply shapes {A.shape} and {P.shape}")
    out = A.copy()
    for _ in range(steps):
        out = out @ P
    return out


def pagerank_diffuse(
    A: np.ndarray,
    P,
    restart_prob: float,
    restart_matrix: np.ndarray | None = None,
    tol: float = 1e-10,
    max_steps: int = 1000,
) -> np.ndarray:
    """Fixed point of the restarted walk: keep walking with probability
    ``restart_prob``, otherwise jump back to ``restart_matrix``.

    The restart matrix defaults to the identity.  Iterates until the
    relative Frobenius change drops below ``tol`` or ``max_steps`` is
    reached.
    """
    if not 0.0 < restart_prob < 1.0:
        raise ParameterError(
            f"restart probability must lie in (0, 1), got {restart_prob}"
        )
    A = np.asarray(A, dtype=np.float64)
    P = walk_matrix(P)
    if restart_matrix is None:
        restart_matrix = np.eye(A.shape[0])
    restart_matrix = np.asarray(restart_matrix, dtype=np.float64)
    if not np.all(np.isfinite(restart_matrix)):
        raise ParameterError("restart matrix contains non-finite entries")
    if A.shape != restart_matrix.shape or A.shape[1] != P.shape[0]:
        raise DimensionError(
            f"incompatible shapes {A.shape} (state), {P.shape} (walk), "
            f"{restart_matrix.shape} (restart)"
        )
    out = A.copy()
    for _ in range(max_steps):
        new = restart_prob * (out @ P) + (1.0 - restart_prob) * restart_matrix
        change = np.linalg.norm(new - out) / max(np.linalg.norm(out), 1e-300)
        out = new
        if change < tol:
            break
    return out


def knn_sparsify(W, num_neighbors: int) -> AffinityGraph:
    """Keep the ``num_neighbors`` largest entries of each row, then
    re-symmetrize.

    Ties are broken toward the lower column index; the output is
    max(W', W'^T) so kept edges stay symmetric.
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    if not 1 <= num_neighbors < N:
        raise ParameterError(
            f"num_neighbors must satisfy 1 <= num_neighbors < N={N}, "
            f"got {num_neighbors}"
        )
    kept = np.zeros_like(W)
    for i in range(N):
        # stable sort on the negated row: equal values keep index order
        order = np.argsort(-W[i], kind="stable")[:num_neighbors]
        kept[i, order] = W[i, order]
    return AffinityGraph(np.maximum(kept, kept.T), meta={"knn": num_neighbors})


def lcdp_diffuse(A: np.ndarray, P, steps: int) -> np.ndarray:
    """Apply the neighborhood-restricted update A <- P A P^T exactly
    ``steps`` times."""
    A = np.asarray(A, dtype=np.float64)
    P = walk_matrix(P)
    if steps < 0:
        raise ParameterError(f"step count must be nonnegative, got {steps}")
    if A.shape[0] != P.shape[1] or A.shape[1] != P.shape[1]:
        raise DimensionError(f"cannot combine shapes {A.shape} and {P.shape}")
    out = A.copy()
    for _ in range(steps):
        out = P @ out @ P.T
    return out


def accumulate_diffuse(W, steps: int | None = None) -> np.ndarray:
    """Partial sum of matrix powers I + W + ... + W^steps, or its limit.

    With ``steps=None`` the geometric-series limit is returned as the
    solution of (I - W) X = I, which requires every row sum to be below 1.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {W.shape}")
    N = W.shape[0]
    if steps is None:
        _check_substochastic(W)
        return solve(np.eye(N) - W, np.eye(N))
    if steps < 0:
        raise ParameterError(f"step count must be nonnegative, got {steps}")
    out = np.eye(N)
    for _ in range(steps):
        out = W @ out + np.eye(N)
    return out


def tpg_diffuse(W, config: DiffusionConfig = DiffusionConfig()) -> AffinityGraph:
    """Tensor-product-graph diffusion by the iteration A <- W A W^T + I.

    Starts from A_1 = W and iterates until the iterate index reaches
    ``config.steps`` or the relative change falls below ``config.tol``.
    Requires a symmetric input with every row sum strictly below 1; the
    result carries step count, final residual, and convergence flag in its
    ``meta``.
    """
    W = affinity_matrix(W)
    _check_substochastic(W)
    N = W.shape[0]
    eye = np.eye(N)
    A = W.copy()
    residual = np.inf
    steps_run = 0
    for _ in range(config.steps - 1):
        new = W @ A @ W.T + eye
        residual = np.linalg.norm(new - A) / max(np.linalg.norm(A), 1e-300)
        A = new
        steps_run += 1
        if residual < config.tol:
            break
    A = 0.5 * (A + A.T)
    meta = {
        "diffusion_variant": "tpg",
        "diffusion_steps": steps_run,
        "diffusion_residual": float(residual) if np.isfinite(residual) else None,
        "diffusion_converged": bool(residual < config.tol),
    }
    return AffinityGraph(A, meta=meta)


def tpg_closed_form(W, size_cap: int = 64) -> AffinityGraph:
    """Kronecker-system oracle for the tensor-product-graph limit.

    Builds the N^2 x N^2 product matrix and solves
    (I - W (x) W) x = vec(I) directly, so it is restricted to small N.
    """
    W = affinity_matrix(W)
    N = W.shape[0]
    if N > size_cap:
        raise ParameterError(
            f"closed form solves an N^2 x N^2 system; N={N} exceeds cap {size_cap}"
        )
    _check_substochastic(W)
    WW = np.kron(W, W)
    rhs = np.eye(N).flatten(order="F")
    x = solve(np.eye(N * N) - WW, rhs)
    A = x.reshape(N, N, order="F")
    A = 0.5 * (A + A.T)
    return AffinityGraph(A, meta={"diffusion_variant": "tpg_closed_form"})


def run_diffusion(W, config: DiffusionConfig) -> np.ndarray:
    """Dispatch on ``config.variant`` and return the diffused matrix.

    Walk-based variants build their transition matrix internally; series
    variants normalize to sub-stochastic form first.
    """
    W = affinity_matrix(W)
    if config.variant == "power":
        return power_diffuse(W, transition_matrix(W), config.steps)
    if config.variant == "pagerank":
        return pagerank_diffuse(
            W,
            transition_matrix(W),
            config.restart_prob,
            config.restart_matrix,
            tol=config.tol,
            max_steps=config.steps,
        )
    if config.variant == "lcdp":
        sparse = knn_sparsify(W, min(config.knn, W.shape[0] - 1))
        return lcdp_diffuse(sparse.W, transition_matrix(sparse), config.steps)
    if config.variant == "accumulate":
        sub = normalize_substochastic(W, config.substochastic_scale)
        return accumulate_diffuse(sub.W, config.steps)
    sub = normalize_substochastic(W, config.substochastic_scale)
    return tpg_diffuse(sub, config).W


def diffuse_affinity(W0, config: DiffusionConfig = DiffusionConfig()) -> AffinityGraph:
    """Normalize, run the tensor-product diffusion, and strip the diagonal.

    This is the affinity handed to spectral clustering: the identity added
    at every diffusion step inflates only self-affinity, which carries no
    cut information, so the diagonal of the final matrix is zeroed.
    """
    source_meta = W0.meta if isinstance(W0, AffinityGraph) else {}
    sub = normalize_substochastic(W0, config.substochastic_scale)
    diffused = tpg_diffuse(sub, config)
    out = diffused.W.copy()
    np.fill_diagonal(out, 0.0)
    meta = dict(source_meta)
    meta.update(diffused.meta)
    return AffinityGraph(out, meta=meta)


def dssc_affinity(
    X: np.ndarray,
    ssc_config: SscConfig = SscConfig(),
    diff_config: DiffusionConfig = DiffusionConfig(),
) -> AffinityGraph:
    """Full affinity pipeline: sparse coding, symmetrization, diffusion.

    Deterministic for fixed inputs and configs; the returned graph's
    ``meta`` records convergence data of both stages.
    """
    coefficients = solve_ssc(X, ssc_config)
    W0 = affinity_from_coefficients(coefficients)
    return diffuse_affinity(W0, diff_config)
