import numpy as np
import pytest
from hypothesis import given, strategies as st

from adagae.data import (SyntheticSpec, blob_centers, generate_synthetic, load_dataset,
                         matrix_to_csv, minmax_scale, read_csv_matrix, read_idx, read_labels,
                         write_idx_images, atomic_write_text)
from adagae.errors import ConfigError, InvalidInputError


def test_minmax_endpoints_and_constant():
    np.testing.assert_array_equal(minmax_scale([[0, 10], [5, 20]]), [[0, 0], [1, 1]])
    out = minmax_scale([[3, 1], [3, 2], [3, 4]])
    assert np.all(out[:, 0] == 0)


@given(st.integers(2, 20), st.integers(1, 5), st.integers(0, 1000))
def test_minmax_range(n, d, seed):
    X = np.random.default_rng(seed).normal(size=(n, d)) * 100
    out = minmax_scale(X)
    assert out.min() >= 0 and out.max() <= 1


def test_csv_with_header(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("a,b\n0,10\n5,20\n")
    X, y = load_dataset(f)
    np.testing.assert_array_equal(X, [[0, 0], [1, 1]])
    assert y is None


def test_csv_parse_error_line(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("0,1\n2,oops\n")
    with pytest.raises(InvalidInputError, match=":2:"):
        read_csv_matrix(f)


def test_csv_width_mismatch(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("0,1\n2,3,4\n")
    with pytest.raises(InvalidInputError, match="expected 2 columns"):
        read_csv_matrix(f)


def test_csv_empty_and_single_row(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("")
    with pytest.raises(InvalidInputError):
        read_csv_matrix(f)
    f.write_text("1,2\n")
    with pytest.raises(InvalidInputError):
        load_dataset(f)


def test_labels(tmp_path):
    f = tmp_path / "y"
    f.write_text("0\n1\n\n2\n")
    np.testing.assert_array_equal(read_labels(f), [0, 1, 2])
    with pytest.raises(InvalidInputError):
        read_labels(f, n=4)
    f.write_text("0\nx\n")
    with pytest.raises(InvalidInputError, match=":2:"):
        read_labels(f)


def test_idx_roundtrip_bytes(tmp_path):
    imgs = np.arange(3 * 28 * 28, dtype=np.uint64).reshape(3, 28, 28) % 256
    f = tmp_path / "img.idx"
    write_idx_images(f, imgs)
    raw = f.read_bytes()
    assert raw[:4] == b"\x00\x00\x08\x03"
    assert raw[4:16] == (3).to_bytes(4, "big") + (28).to_bytes(4, "big") * 2
    np.testing.assert_array_equal(read_idx(f), imgs)
    X, _ = load_dataset(f, "idx_images")
    assert X.shape == (3, 784)
    ref = minmax_scale(imgs.reshape(3, -1) / 255.0)
    np.testing.assert_allclose(X, ref)
    assert X.min() >= 0 and X.max() <= 1


def test_idx_bad_files(tmp_path):
    f = tmp_path / "bad.idx"
    f.write_bytes(b"\x00\x00\x09\x03" + bytes(12))
    with pytest.raises(InvalidInputError, match="magic"):
        read_idx(f)
    f.write_bytes(b"\x00\x00\x08\x02" + (2).to_bytes(4, "big") + (2).to_bytes(4, "big") + bytes(3))
    with pytest.raises(InvalidInputError, match="payload"):
        read_idx(f)


def test_unknown_format(tmp_path):
    with pytest.raises(ConfigError):
        load_dataset(tmp_path / "x", "parquet")


def test_blobs_balanced_and_deterministic():
    spec = SyntheticSpec("gaussian_blobs", n=300, c=3, noise=0.05, seed=4)
    X, y = generate_synthetic(spec)
    assert np.bincount(y).tolist() == [100, 100, 100]
    X2, _ = generate_synthetic(spec)
    assert np.array_equal(X, X2)


def test_blob_centers_separated():
    for c, d in [(3, 2), (5, 2), (9, 3), (2, 1)]:
        C = blob_centers(c, d)
        D = np.sqrt(((C[:, None] - C[None]) ** 2).sum(-1))
        assert D[~np.eye(c, dtype=bool)].min() >= 1.0


def test_moons_on_half_circles_without_noise():
    X, y = generate_synthetic(SyntheticSpec("two_moons", n=100, d=2, c=2, noise=0.0))
    outer = X[y == 0]
    inner = X[y == 1]
    np.testing.assert_allclose(np.hypot(*outer.T), 1.0)
    np.testing.assert_allclose(np.hypot(inner[:, 0] - 1, inner[:, 1] - 0.5), 1.0)
    assert np.all(outer[:, 1] >= -1e-12) and np.all(inner[:, 1] <= 0.5 + 1e-12)


@pytest.mark.parametrize("kw", [dict(generator="spirals"), dict(generator="two_moons", c=3),
                                dict(n=4, c=3), dict(noise=-1.0)])
def test_spec_validation(kw):
    with pytest.raises(ConfigError):
        generate_synthetic(SyntheticSpec(**kw))


def test_csv_roundtrip(tmp_path, rng):
    X = rng.standard_normal((7, 3))
    f = tmp_path / "m.csv"
    atomic_write_text(f, matrix_to_csv(X))
    np.testing.assert_array_equal(read_csv_matrix(f), X)
    assert [p.name for p in tmp_path.iterdir()] == ["m.csv"]
