"""Operator-splitting solver for the l1 self-expressive program.

Each data point is coded as a sparse linear combination of the others:

    minimize ||C||_1 + lam * err(E)   subject to  X = X C + E, diag(C) = 0

where err is either (1/2)||.||_F^2 (Gaussian noise) or ||.||_1 (outliers),
and lam = sparsity_weight_factor / mu with the data-dependent base weight
mu = min_j max_{i != j} |x_j^T x_i| computed on column-normalized data.

Columns are l2-normalized internally before coding, and C is reported in
those normalized coordinates, which makes mu and all thresholds
scale-free.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionError, ParameterError
from .graph import AffinityGraph

_TINY = 1e-12


@dataclass(frozen=True)
class SscConfig:
    """Solver settings for the self-expressive coding step.

    ``sparsity_weight_factor`` multiplies the data-dependent base weight;
    larger values trade sparsity of C for a smaller error term.
    ``admm_penalty`` is the splitting step parameter rho (affects the
    iteration path, not the optimum).
    """

    error_norm: str = "frobenius"
    sparsity_weight_factor: float = 160.0
    admm_penalty: float = 20.0
    max_iters: int = 6000
    primal_tol: float = 1e-5
    dual_tol: float = 1e-5

    def __post_init__(self):
        if self.error_norm not in ("frobenius", "l1"):
            raise ParameterError(
                f"error_norm must be 'frobenius' or 'l1', got {self.error_norm!r}"
            )
        if self.sparsity_weight_factor <= 0.0:
            raise ParameterError("sparsity_weight_factor must be positive")
        if self.admm_penalty <= 0.0:
            raise ParameterError("admm_penalty must be positive")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be at least 1")
        if self.primal_tol <= 0.0 or self.dual_tol <= 0.0:
            raise ParameterError("tolerances must be positive")


@dataclass
class CoefficientMatrix:
    """Self-expressive coefficients C (N, N) and error term E (D, N).

    diag(C) is exactly zero.  ``residual_history`` holds one
    (primal, dual) pair of relative residual norms per iteration;
    ``objective_history`` tracks ||C||_1 + lam * err(X - X C).
    """

    C: np.ndarray
    E: np.ndarray
    residual_history: list = field(default_factory=list)
    objective_history: list = field(default_factory=list)
    converged: bool = False
    n_iters: int = 0
    weight: float = 0.0
    column_norms: np.ndarray | None = None


def _soft_threshold(A, tau):
    return np.sign(A) * np.maximum(np.abs(A) - tau, 0.0)


def base_weight(X: np.ndarray) -> float:
    """min over columns of the largest absolute correlation with another
    column; X must be column-normalized."""
    G = np.abs(X.T @ X)
    np.fill_diagonal(G, -np.inf)
    return float(G.max(axis=0).min())


def self_expression_objective(X, C, weight, error_norm="frobenius") -> float:
    """||C||_1 + weight * err(X - X C) with E eliminated through the
    constraint."""
    R = X - X @ C
    if error_norm == "frobenius":
        err = 0.5 * float(np.sum(R * R))
    else:
        err = float(np.abs(R).sum())
    return float(np.abs(C).sum()) + weight * err


def solve_ssc(X: np.ndarray, config: SscConfig = SscConfig()) -> CoefficientMatrix:
    """Solve the self-expressive program by ADMM.

    Splits C into an unconstrained copy A, alternating a cached-Cholesky
    quadratic step for A, soft-thresholding plus exact diagonal projection
    for C, a shrinkage step for E, and dual ascent.  Stops when both
    relative residuals fall below their tolerances; running out of
    iterations is reported through ``converged=False``, not raised.

    Parameters
    ----------
    X : ndarray, shape (D, N)
        Data matrix, one point per column.  No all-zero columns.
    config : SscConfig

    Returns
    -------
    CoefficientMatrix
        Coefficients in column-normalized coordinates, diag(C) exactly 0.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"data matrix must be 2-D, got shape {X.shape}")
    D, N = X.shape
    if N < 2:
        raise ParameterError(f"need at least 2 data points, got {N}")
    if not np.all(np.isfinite(X)):
        raise ParameterError("data matrix contains non-finite entries")
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms <= 0.0):
        bad = int(np.argmax(norms <= 0.0))
        raise ParameterError(f"column {bad} of the data matrix is all zero")

    Xn = X / norms[np.newaxis, :]
    mu = base_weight(Xn)
    lam = config.sparsity_weight_factor / max(mu, _TINY)
    rho = config.admm_penalty
    rho_min = config.admm_penalty * 1e-4
    rho_max = config.admm_penalty * 1e4

    G = Xn.T @ Xn
    factor = cho_factor(G + np.eye(N), lower=True)
    spectral_norm = float(np.linalg.norm(Xn, 2))
    x_scale = float(np.linalg.norm(Xn))

    C = np.zeros((N, N))
    E = np.zeros((D, N))
    U1 = np.zeros((N, N))  # scaled dual for A = C
    U2 = np.zeros((D, N))  # scaled dual for X = X A + E

    residual_history = []
    objective_history = []
    converged = False
    n_iters = 0
    cooldown = 4
    next_adapt = 1
    for _ in range(config.max_iters):
        n_iters += 1
        A = cho_solve(factor, (C - U1) + Xn.T @ (Xn - E + U2))
        C_prev, E_prev = C, E
        C = _soft_threshold(A + U1, 1.0 / rho)
        np.fill_diagonal(C, 0.0)
        XA = Xn @ A
        R = Xn - XA + U2
        if config.error_norm == "frobenius":
            E = (rho / (lam + rho)) * R
        else:
            E = _soft_threshold(R, lam / rho)

        gap_c = A - C
        gap_x = Xn - XA - E
        U1 = U1 + gap_c
        U2 = U2 + gap_x

        # sigma_1 weighting makes the A=C gap commensurate with the
        # feasibility gap it induces in X - X C - E.
        primal = max(
            spectral_norm * float(np.linalg.norm(gap_c)), float(np.linalg.norm(gap_x))
        ) / x_scale
        dual = (
            rho
            * np.sqrt(np.linalg.norm(C - C_prev) ** 2 + np.linalg.norm(E - E_prev) ** 2)
            / x_scale
        )
        residual_history.append((primal, dual))
        objective_history.append(
            self_expression_objective(Xn, C, lam, config.error_norm)
        )
        if primal < config.primal_tol and dual < config.dual_tol:
            converged = True
            break
        # Residual balancing keeps the two gaps shrinking at similar
        # rates; the quadratic step is unaffected because the penalty
        # cancels from its normal equations, so no refactorization.
        # Rescaling happens on an exponentially backed-off schedule:
        # each jump perturbs the residuals it is chasing, so late
        # adjustments must become rare for the tail to settle.
        if n_iters >= next_adapt:
            if primal > 10.0 * dual and rho < rho_max:
                rho *= 2.0
                U1 *= 0.5
                U2 *= 0.5
                cooldown *= 2
                next_adapt = n_iters + cooldown
            elif dual > 10.0 * primal and rho > rho_min:
                rho *= 0.5
                U1 *= 2.0
                U2 *= 2.0
                cooldown *= 2
                next_adapt = n_iters + cooldown

    return CoefficientMatrix(
        C=C,
        E=E,
        residual_history=residual_history,
        objective_history=objective_history,
        converged=converged,
        n_iters=n_iters,
        weight=lam,
        column_norms=norms,
    )


def affinity_from_coefficients(C) -> AffinityGraph:
    """Symmetrize coefficients into the affinity W = |C| + |C^T|."""
    meta = {}
    if isinstance(C, CoefficientMatrix):
        meta = {
            "solver_converged": C.converged,
            "solver_iters": C.n_iters,
        }
        C = C.C
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionError(f"coefficient matrix must be square, got shape {C.shape}")
    W = np.abs(C) + np.abs(C.T)
    return AffinityGraph(W, meta=meta)
