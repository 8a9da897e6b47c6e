"""Tests for synthetic data generation, corruption, and matrix I/O."""

import numpy as np
import pytest

from dssc import (
    MatrixFormatError,
    MatrixParseError,
    ParameterError,
    SyntheticSpec,
    corrupt,
    generate_synthetic,
    load_labels,
    load_matrix,
    save_labels,
    save_matrix,
)


def test_default_shapes_and_labels():
    ds = generate_synthetic(SyntheticSpec(), seed=0)
    assert ds.data.shape == (100, 250)
    np.testing.assert_array_equal(ds.labels, np.repeat(np.arange(5), 50))


def test_single_subspace_rank():
    spec = SyntheticSpec(ambient_dim=20, num_subspaces=1, subspace_dim=5, points_per_subspace=12)
    ds = generate_synthetic(spec, seed=3)
    s = np.linalg.svd(ds.data, compute_uv=False)
    assert np.all(s[5:] <= 1e-10 * s[0])


def test_per_class_blocks_are_one_dimensional():
    spec = SyntheticSpec(ambient_dim=10, num_subspaces=2, subspace_dim=1, points_per_subspace=5)
    ds = generate_synthetic(spec, seed=7)
    for c in range(2):
        block = ds.data[:, ds.labels == c]
        s = np.linalg.svd(block, compute_uv=False)
        assert s[1] / s[0] <= 1e-10


def test_clean_class_rank_is_exactly_d():
    ds = generate_synthetic(SyntheticSpec(), seed=11)
    for c in range(5):
        block = ds.data[:, ds.labels == c]
        s = np.linalg.svd(block, compute_uv=False)
        assert s[4] / s[0] > 1e-6  # genuinely d-dimensional
        assert s[5] / s[0] <= 1e-10


def test_generation_is_bit_deterministic():
    spec = SyntheticSpec(ambient_dim=30, num_subspaces=3, subspace_dim=4,
                         points_per_subspace=10, corruption_fraction=0.4)
    a = generate_synthetic(spec, seed=42)
    b = generate_synthetic(spec, seed=42)
    assert a.data.tobytes() == b.data.tobytes()
    assert np.array_equal(a.labels, b.labels)
    c = generate_synthetic(spec, seed=43)
    assert a.data.tobytes() != c.data.tobytes()


def test_invalid_spec_rejected():
    with pytest.raises(ParameterError):
        SyntheticSpec(ambient_dim=5, subspace_dim=5)
    with pytest.raises(ParameterError):
        SyntheticSpec(num_subspaces=0)
    with pytest.raises(ParameterError):
        SyntheticSpec(corruption_fraction=1.5)
    with pytest.raises(ParameterError):
        SyntheticSpec(noise_scale=-0.1)


def test_corrupt_zero_fraction_is_identity():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(8, 20))
    out = corrupt(X, 0.0, 0.3, seed=5)
    assert out.tobytes() == X.tobytes()


def test_corrupt_zero_noise_is_identity():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(8, 20))
    out = corrupt(X, 1.0, 0.0, seed=5)
    assert out.tobytes() == X.tobytes()


def test_corrupt_column_count_exact():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(10, 250))
    out = corrupt(X, 0.5, 0.3, seed=9)
    changed = np.any(out != X, axis=0)
    assert changed.sum() == 125
    # unchosen columns are bit-identical, not merely close
    assert np.all(out[:, ~changed] == X[:, ~changed])
    # half-up rounding of the column count
    X5 = rng.normal(size=(4, 5))
    assert np.any(corrupt(X5, 0.5, 0.3, seed=1) != X5, axis=0).sum() == 3


def test_corrupt_deterministic_per_seed():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(6, 30))
    a = corrupt(X, 0.4, 0.3, seed=17)
    b = corrupt(X, 0.4, 0.3, seed=17)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != corrupt(X, 0.4, 0.3, seed=18).tobytes()


def test_corrupt_rejects_bad_fraction():
    X = np.ones((3, 4))
    with pytest.raises(ParameterError):
        corrupt(X, -0.1, 0.3, seed=0)
    with pytest.raises(ParameterError):
        corrupt(X, 1.01, 0.3, seed=0)


def test_matrix_roundtrip_csv(tmp_path):
    path = tmp_path / "m.csv"
    X = np.array([[1.0, 2.0], [3.0, 4.0], [-5.0, 6.0]])
    save_matrix(X, path)
    np.testing.assert_array_equal(load_matrix(path), X)
    # 17 significant digits round-trip doubles exactly
    Y = np.random.default_rng(4).normal(size=(5, 7)) * 1e-3
    save_matrix(Y, path)
    np.testing.assert_array_equal(load_matrix(path), Y)


def test_matrix_roundtrip_binary(tmp_path):
    path = tmp_path / "m.bin"
    Y = np.random.default_rng(5).normal(size=(6, 4))
    save_matrix(Y, path, fmt="binary")
    out = load_matrix(path, fmt="binary")
    assert out.tobytes() == Y.tobytes()


def test_csv_parse_error_names_location(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2,3\n4,oops,6\n")
    with pytest.raises(MatrixParseError) as exc:
        load_matrix(path)
    assert "line 2" in str(exc.value)
    assert "column 2" in str(exc.value)


def test_empty_file_is_format_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(MatrixFormatError):
        load_matrix(path)


def test_ragged_rows_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(MatrixFormatError):
        load_matrix(path)


def test_non_finite_entries_rejected(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("1,inf\n2,3\n")
    with pytest.raises(MatrixFormatError):
        load_matrix(path)


def test_binary_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"XXXX" + b"\x00" * 16)
    with pytest.raises(MatrixFormatError):
        load_matrix(path, fmt="binary")


def test_binary_truncated_payload(tmp_path):
    path = tmp_path / "short.bin"
    save_matrix(np.ones((2, 3)), path, fmt="binary")
    blob = path.read_bytes()
    path.write_bytes(blob[:-8])
    with pytest.raises(MatrixFormatError):
        load_matrix(path, fmt="binary")


def test_labels_roundtrip(tmp_path):
    path = tmp_path / "labels.txt"
    labels = np.array([0, 0, 2, 1, 1, 4])
    save_labels(labels, path)
    np.testing.assert_array_equal(load_labels(path), labels)


def test_labels_parse_error(tmp_path):
    path = tmp_path / "labels.txt"
    path.write_text("0\n1\nnope\n")
    with pytest.raises(MatrixParseError):
        load_labels(path)
