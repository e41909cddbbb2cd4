"""Alternating graph construction and auto-encoder training with a growing sparsity."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import gae
from .clustering import ClusteringResult, kmeans, spectral_clustering
from .errors import AdaGAEError, ConfigError
from .graph import build_graph, weight_dispersion

log = logging.getLogger(__name__)

BACKENDS = ("spectral", "kmeans")
KMAX_RULES = ("n_over_c", "n_over_2c")


@dataclass
class TrainConfig:
    k0: int = 5
    k_max: int | None = None
    k_max_rule: str = "n_over_c"
    epochs: int = 10
    lam: float = 1.0
    lr: float = 1e-2
    inner_iters: int = 100
    tol: float = 1e-6
    optimizer: str = "gd"
    layer_dims: list | None = None
    activations: list | None = None
    seed: int = 0
    backend: str = "spectral"
    freeze_graph: bool = False
    freeze_k: bool = False
    lambda_zero: bool = False

    def validate(self):
        if self.k0 < 2:
            raise ConfigError(f"k0 must be >= 2, got {self.k0}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.k_max_rule not in KMAX_RULES:
            raise ConfigError(f"k_max_rule must be one of {KMAX_RULES}, got {self.k_max_rule!r}")
        if self.lam < 0:
            raise ConfigError("lam must be >= 0")
        if self.lr <= 0 or self.inner_iters < 1:
            raise ConfigError("lr must be positive and inner_iters >= 1")
        return self

    def resolve_k_max(self, n, c):
        """Upper sparsity bound: explicit value or floor(n/c) / floor(n/2c), clamped to n-1."""
        if self.freeze_k:
            return self.k0
        if self.k_max is not None:
            km = int(self.k_max)
        else:
            km = n // c if self.k_max_rule == "n_over_c" else n // (2 * c)
        km = min(km, n - 1)
        if km < self.k0:
            raise ConfigError(f"k_max={km} is below k0={self.k0} for n={n}, c={c}")
        return km


@dataclass
class EpochRecord:
    epoch: int
    k: int
    loss: float
    cross_entropy: float
    smoothness: float
    inner_iters: int
    nnz: int
    mean_degree: float
    dispersion: float

    def to_json(self):
        return json.dumps(asdict(self))


@dataclass
class RunResult:
    clustering: ClusteringResult
    embedding: np.ndarray
    epochs: list
    losses: list
    graph: object = None
    distribution: object = None
    params: object = None
    ks: list = field(default_factory=list)

    @property
    def labels(self):
        return self.clustering.labels


def sparsity_schedule(k0, k_max, T) -> list:
    """Per-epoch sparsity ``k0 + round(i * (k_max - k0) / T)`` for i in 0..T-1."""
    if T < 1 or k0 > k_max:
        raise ConfigError(f"need T >= 1 and k0 <= k_max, got k0={k0}, k_max={k_max}, T={T}")
    step = (k_max - k0) / T
    ks = []
    for i in range(T):
        k = k0 + math.floor(i * step + 0.5)
        k = min(max(k, k0), k_max)
        if ks and k < ks[-1]:
            k = ks[-1]
        ks.append(k)
    return ks


def run(X, c, config: TrainConfig, on_epoch=None) -> RunResult:
    """Fit the adaptive graph auto-encoder to ``X`` and cluster into ``c`` groups.

    ``on_epoch`` is called with each EpochRecord as soon as it is complete.
    """
    config.validate()
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if c < 1 or n < c:
        raise ConfigError(f"need 1 <= c <= n, got c={c}, n={n}")
    k_max = config.resolve_k_max(n, c)
    ks = sparsity_schedule(config.k0, k_max, config.epochs)
    lam = 0.0 if config.lambda_zero else config.lam

    dims = config.layer_dims or gae.default_layer_dims(d)
    acts = config.activations or ["relu"] + ["linear"] * (len(dims) - 1)
    enc = gae.EncoderConfig(layer_dims=dims, activations=acts, seed=config.seed)
    params = gae.init_params(enc, d)

    Z = X
    P = W = None
    records, losses = [], []
    for epoch, k in enumerate(ks):
        try:
            if W is None or not config.freeze_graph:
                P, W = build_graph(Z, k)
            res = gae.fit(P, X, W.normalized, W.laplacian, params, enc, lam,
                          config.lr, config.inner_iters, config.tol, config.optimizer)
        except AdaGAEError as exc:
            exc.epoch = epoch
            exc.args = (f"epoch {epoch}: {exc}",)
            raise
        params = res.params
        Z = gae.encode(W.normalized, X, params, enc)
        val = gae.objective(P, X, W.normalized, W.laplacian, params, enc, lam)
        losses.extend(res.losses)
        rec = EpochRecord(
            epoch=epoch, k=k, loss=val.total, cross_entropy=val.cross_entropy,
            smoothness=val.smoothness, inner_iters=res.n_iter,
            nnz=int(W.adjacency.nnz), mean_degree=float(W.adjacency.nnz / n),
            dispersion=weight_dispersion(W.adjacency),
        )
        records.append(rec)
        log.info("epoch %d k=%d loss=%.6g", epoch, k, val.total)
        if on_epoch is not None:
            on_epoch(rec)

    if config.backend == "spectral":
        result = spectral_clustering(W.normalized, c, seed=config.seed)
    else:
        result = kmeans(Z, c, seed=config.seed)
    return RunResult(result, Z, records, losses, W, P, params, ks)
