"""Synthetic union-of-subspaces data, the corruption model, and matrix IO.

Data matrices are dense float64 arrays of shape (D, N): one data point per
column, living in a D-dimensional ambient space.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, MatrixFormatError, MatrixParseError, ParameterError

BINARY_MAGIC = b"SDM1"


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic union-of-subspaces generator.

    Defaults reproduce the desk-scale benchmark: 5 five-dimensional
    subspaces of R^100 with 50 points each.
    """

    ambient_dim: int = 100
    num_subspaces: int = 5
    subspace_dim: int = 5
    points_per_subspace: int = 50
    corruption_fraction: float = 0.0
    noise_scale: float = 0.3

    def __post_init__(self):
        for name in ("ambient_dim", "num_subspaces", "subspace_dim", "points_per_subspace"):
            value = getattr(self, name)
            if not (isinstance(value, (int, np.integer)) and value >= 1):
                raise ParameterError(f"{name} must be a positive integer, got {value!r}")
        if self.subspace_dim >= self.ambient_dim:
            raise ParameterError(
                f"subspace_dim ({self.subspace_dim}) must be smaller than "
                f"ambient_dim ({self.ambient_dim})"
            )
        if not 0.0 <= self.corruption_fraction <= 1.0:
            raise ParameterError(
                f"corruption_fraction must lie in [0, 1], got {self.corruption_fraction}"
            )
        if self.noise_scale < 0.0:
            raise ParameterError(f"noise_scale must be nonnegative, got {self.noise_scale}")

    @property
    def num_points(self):
        return self.num_subspaces * self.points_per_subspace


@dataclass
class LabeledDataset:
    """A (D, N) data matrix paired with per-column cluster labels in [0, k)."""

    data: np.ndarray
    labels: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.data.ndim != 2:
            raise DimensionError(f"data must be 2-D, got shape {self.data.shape}")
        if self.labels.shape != (self.data.shape[1],):
            raise DimensionError(
                f"labels shape {self.labels.shape} does not match "
                f"{self.data.shape[1]} data columns"
            )


def _random_rotation(dim, rng):
    """Haar-uniform orthogonal matrix with determinant +1."""
    Z = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    # Sign correction makes Q uniform over the orthogonal group.
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def generate_synthetic(spec: SyntheticSpec, seed: int) -> LabeledDataset:
    """Sample a union-of-subspaces dataset and apply the corruption model.

    A base matrix U of shape (D, d) with orthonormalized columns is drawn
    once; each subspace basis is U_i = T_i @ U for an independent random
    rotation T_i.  The i-th class block is X_i = U_i @ Q_i with
    standard-Gaussian coordinates Q_i, so columns [i*n, (i+1)*n) carry
    label i.  A fraction of columns is then corrupted via :func:`corrupt`.

    Deterministic for a fixed (spec, seed) pair.
    """
    rng = np.random.default_rng(seed)
    D, d = spec.ambient_dim, spec.subspace_dim
    k, n = spec.num_subspaces, spec.points_per_subspace

    base = rng.standard_normal((D, d))
    U, _ = np.linalg.qr(base)  # orthonormal columns: subspace dim exactly d

    blocks = []
    for _ in range(k):
        T = _random_rotation(D, rng)
        Q = rng.standard_normal((d, n))
        blocks.append((T @ U) @ Q)
    X = np.hstack(blocks)
    labels = np.repeat(np.arange(k, dtype=np.int64), n)

    corrupt_seed = int(rng.integers(0, 2**63))
    X = corrupt(X, spec.corruption_fraction, spec.noise_scale, corrupt_seed)
    return LabeledDataset(X, labels, meta={"seed": seed, "corrupt_seed": corrupt_seed})


def corrupt(X: np.ndarray, fraction: float, noise_scale: float, seed: int) -> np.ndarray:
    """Add Gaussian noise to a uniformly chosen fraction of columns.

    Exactly round(fraction * N) columns (round half up) are modified.  A
    chosen column x receives i.i.d. zero-mean Gaussian noise with per-entry
    standard deviation sqrt(noise_scale * ||x||_2 / D), so the expected
    squared noise norm is noise_scale * ||x||_2.  Unchosen columns are
    returned bit-identical; columns are not re-normalized afterwards.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ParameterError(f"fraction must lie in [0, 1], got {fraction}")
    if noise_scale < 0.0:
        raise ParameterError(f"noise_scale must be nonnegative, got {noise_scale}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D data matrix, got shape {X.shape}")

    D, N = X.shape
    count = int(np.floor(fraction * N + 0.5))
    out = X.copy()
    if count == 0:
        return out

    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(N, size=count, replace=False))
    norms = np.linalg.norm(out[:, chosen], axis=0)
    sigma = np.sqrt(noise_scale * norms / D)
    out[:, chosen] += rng.standard_normal((D, count)) * sigma[np.newaxis, :]
    return out


# ---------------------------------------------------------------------------
# Matrix and label files.
#
# Text format: header-free CSV with D lines of N comma-separated values
# (row-major lines; one data point per column).  Binary format: magic
# "SDM1", two little-endian uint64 dims, then row-major float64 entries.
# Labels: newline-separated base-10 integers.
# ---------------------------------------------------------------------------


def save_matrix(X: np.ndarray, path, fmt: str = "csv") -> None:
    """Write a matrix as CSV (17 significant digits) or raw binary."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ParameterError("matrix contains non-finite entries")
    if fmt == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            for row in X:
                fh.write(",".join(format(v, ".17g") for v in row))
                fh.write("\n")
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(BINARY_MAGIC)
            fh.write(struct.pack("<QQ", X.shape[0], X.shape[1]))
            fh.write(X.astype("<f8").tobytes(order="C"))
    else:
        raise ParameterError(f"unknown matrix format {fmt!r}")


def load_matrix(path, fmt: str = "csv") -> np.ndarray:
    """Read a matrix written by :func:`save_matrix`.

    Raises :class:`MatrixParseError` naming the 1-based line/column of the
    first bad token, and :class:`MatrixFormatError` for empty files, ragged
    rows, or corrupt binary headers.
    """
    if fmt == "csv":
        return _load_matrix_csv(path)
    if fmt == "binary":
        return _load_matrix_binary(path)
    raise ParameterError(f"unknown matrix format {fmt!r}")


def _load_matrix_csv(path):
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise MatrixFormatError(
                    f"{path}: line {line_no} has {len(tokens)} values, expected {width}"
                )
            row = np.empty(len(tokens))
            for col_no, token in enumerate(tokens, start=1):
                try:
                    row[col_no - 1] = float(token)
                except ValueError:
                    raise MatrixParseError(
                        f"{path}: line {line_no}, column {col_no}: "
                        f"cannot parse {token.strip()!r} as a number"
                    ) from None
            rows.append(row)
    if not rows:
        raise MatrixFormatError(f"{path}: empty matrix file")
    X = np.vstack(rows)
    if not np.all(np.isfinite(X)):
        raise MatrixFormatError(f"{path}: matrix contains non-finite entries")
    return X


def _load_matrix_binary(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    header = len(BINARY_MAGIC) + 16
    if len(blob) < header:
        raise MatrixFormatError(f"{path}: truncated binary matrix file")
    if blob[: len(BINARY_MAGIC)] != BINARY_MAGIC:
        raise MatrixFormatError(f"{path}: bad magic bytes, not a binary matrix file")
    n_rows, n_cols = struct.unpack("<QQ", blob[len(BINARY_MAGIC) : header])
    expected = header + 8 * n_rows * n_cols
    if len(blob) != expected:
        raise MatrixFormatError(
            f"{path}: payload size {len(blob) - header} bytes does not match "
            f"declared {n_rows}x{n_cols} matrix"
        )
    data = np.frombuffer(blob, dtype="<f8", offset=header)
    return data.reshape(n_rows, n_cols).astype(np.float64)


def save_labels(labels: np.ndarray, path) -> None:
    """Write labels one base-10 integer per line."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise DimensionError(f"labels must be 1-D, got shape {labels.shape}")
    with open(path, "w", encoding="utf-8") as fh:
        for value in labels:
            fh.write(f"{int(value)}\n")


def load_labels(path) -> np.ndarray:
    """Read a newline-separated integer label file."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise MatrixParseError(
                    f"{path}: line {line_no}: cannot parse {line!r} as an integer"
                ) from None
    if not labels:
        raise MatrixFormatError(f"{path}: empty label file")
    return np.asarray(labels, dtype=np.int64)
