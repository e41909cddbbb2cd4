import numpy as np
import pytest
from hypothesis import given, strategies as st

from adagae import gae
from adagae.clustering import kmeans
from adagae.data import SyntheticSpec, generate_synthetic, minmax_scale
from adagae.errors import ConfigError, DivergenceError
from adagae.graph import build_graph
from adagae.trainer import TrainConfig, run, sparsity_schedule


def small_blobs(seed=0, n=45):
    X, y = generate_synthetic(SyntheticSpec("gaussian_blobs", n=n, c=3, noise=0.05, seed=seed))
    return minmax_scale(X), y


FAST = dict(epochs=3, inner_iters=5, layer_dims=[8, 4])


def test_schedule_examples():
    assert sparsity_schedule(5, 5, 10) == [5] * 10
    assert sparsity_schedule(5, 25, 10) == [5, 7, 9, 11, 13, 15, 17, 19, 21, 23]
    ks = sparsity_schedule(5, 10, 10)
    assert ks[0] == 5 and ks[-1] <= 10


def test_schedule_rejects():
    with pytest.raises(ConfigError):
        sparsity_schedule(6, 5, 3)
    with pytest.raises(ConfigError):
        sparsity_schedule(5, 6, 0)


@given(st.integers(2, 50), st.integers(0, 200), st.integers(1, 30))
def test_schedule_properties(k0, extra, T):
    ks = sparsity_schedule(k0, k0 + extra, T)
    assert len(ks) == T
    assert ks[0] == k0
    assert all(k0 <= k <= k0 + extra for k in ks)
    assert all(b >= a for a, b in zip(ks, ks[1:]))


@pytest.mark.parametrize("kw", [dict(k0=1), dict(epochs=0), dict(backend="dbscan"), dict(lam=-1.0),
                                dict(lr=0.0), dict(inner_iters=0), dict(k_max_rule="sqrt")])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        TrainConfig(**kw).validate()


def test_resolve_k_max():
    assert TrainConfig().resolve_k_max(300, 3) == 100
    assert TrainConfig(k_max_rule="n_over_2c").resolve_k_max(300, 3) == 50
    assert TrainConfig(k_max=1000).resolve_k_max(300, 3) == 299
    assert TrainConfig(freeze_k=True).resolve_k_max(300, 3) == 5
    assert TrainConfig().resolve_k_max(10, 1) == 9
    with pytest.raises(ConfigError):
        TrainConfig(k0=20).resolve_k_max(30, 3)


def test_run_records_and_determinism():
    X, y = small_blobs()
    cfg = TrainConfig(**FAST, seed=3)
    seen = []
    a = run(X, 3, cfg, on_epoch=seen.append)
    b = run(X, 3, cfg)
    assert [r.epoch for r in seen] == [0, 1, 2]
    assert np.array_equal(a.labels, b.labels)
    assert a.losses == b.losses
    ks = [r.k for r in a.epochs]
    assert ks == a.ks and all(q >= p for p, q in zip(ks, ks[1:]))
    assert all(5 <= k <= 15 for k in ks)
    assert a.embedding.shape == (45, 4)


def test_single_epoch_kmeans_unrolled():
    X, _ = small_blobs(1)
    cfg = TrainConfig(epochs=1, inner_iters=7, layer_dims=[6, 3], backend="kmeans", seed=2)
    res = run(X, 3, cfg)
    P, W = build_graph(X, 5)
    enc = gae.EncoderConfig([6, 3], ["relu", "linear"], seed=2)
    fitted = gae.fit(P, X, W.normalized, W.laplacian, gae.init_params(enc, 2), enc, 1.0, 1e-2, 7)
    Z = gae.encode(W.normalized, X, fitted.params, enc)
    np.testing.assert_array_equal(res.embedding, Z)
    np.testing.assert_array_equal(res.labels, kmeans(Z, 3, seed=2).labels)


def test_freeze_graph_keeps_first_graph():
    X, _ = small_blobs(2)
    res = run(X, 3, TrainConfig(**FAST, freeze_graph=True))
    P, W = build_graph(X, 5)
    assert (res.graph.adjacency != W.adjacency).nnz == 0


def test_freeze_k_and_lambda_zero():
    X, _ = small_blobs(3)
    res = run(X, 3, TrainConfig(**FAST, freeze_k=True, lambda_zero=True))
    assert [r.k for r in res.epochs] == [5, 5, 5]
    assert all(r.loss == pytest.approx(r.cross_entropy) for r in res.epochs)


def test_divergence_carries_epoch():
    X, _ = small_blobs(4)
    with pytest.raises(DivergenceError) as info:
        run(X, 3, TrainConfig(**{**FAST, "epochs": 2}, lr=1e200))
    assert info.value.epoch == 0
    assert str(info.value).startswith("epoch 0")


def test_rejects_bad_cluster_count():
    X, _ = small_blobs()
    with pytest.raises(ConfigError):
        run(X, 0, TrainConfig(**FAST))
    with pytest.raises(ConfigError):
        run(X[:2], 3, TrainConfig(**FAST))


def test_epoch_record_json():
    import json
    X, _ = small_blobs()
    res = run(X, 3, TrainConfig(**FAST))
    rec = json.loads(res.epochs[0].to_json())
    assert set(rec) == {"epoch", "k", "loss", "cross_entropy", "smoothness", "inner_iters",
                        "nnz", "mean_degree", "dispersion"}
