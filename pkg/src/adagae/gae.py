"""Graph auto-encoder with a distance-softmax decoder.

Encoder: stacked graph convolutions ``H <- act(A_hat @ H @ W)``.
Decoder: ``q(j|i) = softmax_j(-||z_i - z_j||^2)``.
Loss: cross entropy of the target connectivity ``P`` against ``Q`` plus
``lam * tr(Z^T L Z)``. Gradients are derived by hand and checked against
finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from .errors import ConfigError, DivergenceError, InvalidInputError, NumericError
from .graph import pairwise_sq_distances

ACTIVATIONS = ("relu", "linear")
_ALIASES = {"rectifier": "relu", "identity": "linear"}


def default_layer_dims(d):
    return [256, 64] if d >= 1024 else [128, 64]


@dataclass
class EncoderConfig:
    layer_dims: list = field(default_factory=lambda: [128, 64])
    activations: list = field(default_factory=lambda: ["relu", "linear"])
    seed: int = 0

    def __post_init__(self):
        self.layer_dims = [int(h) for h in self.layer_dims]
        self.activations = [_ALIASES.get(a, a) for a in self.activations]
        if not self.layer_dims:
            raise ConfigError("encoder needs at least one layer")
        if any(h < 1 for h in self.layer_dims):
            raise ConfigError(f"layer widths must be >= 1, got {self.layer_dims}")
        if len(self.activations) != len(self.layer_dims):
            raise ConfigError("need exactly one activation per layer")
        bad = [a for a in self.activations if a not in ACTIVATIONS]
        if bad:
            raise ConfigError(f"unknown activation(s) {bad}; choose from {ACTIVATIONS}")

    @classmethod
    def for_input(cls, d, seed=0):
        return cls(layer_dims=default_layer_dims(d), seed=seed)


@dataclass
class GaeParams:
    weights: list

    def copy(self):
        return GaeParams([W.copy() for W in self.weights])

    def flat(self):
        return np.concatenate([W.ravel() for W in self.weights])


class LossValue(NamedTuple):
    total: float
    cross_entropy: float
    smoothness: float


def init_params(config: EncoderConfig, in_dim: int, rng=None) -> GaeParams:
    """Uniform(-b, b) weights with ``b = sqrt(6 / (fan_in + fan_out))``."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    weights = []
    fan_in = int(in_dim)
    for fan_out in config.layer_dims:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        fan_in = fan_out
    return GaeParams(weights)


def _check_shapes(A_hat, X, params):
    n = X.shape[0]
    if A_hat.shape != (n, n):
        raise ConfigError(f"A_hat has shape {A_hat.shape}, expected ({n}, {n})")
    width = X.shape[1]
    for ell, W in enumerate(params.weights):
        if W.shape[0] != width:
            raise ConfigError(f"layer {ell}: weight has {W.shape[0]} input rows, expected {width}")
        width = W.shape[1]


def _forward(A_hat, X, params, config):
    """Return (Z, cache) where cache holds per-layer (propagated input, pre-activation)."""
    X = np.asarray(X, dtype=np.float64)
    _check_shapes(A_hat, X, params)
    H = X
    cache = []
    for ell, (W, act) in enumerate(zip(params.weights, config.activations)):
        with np.errstate(over="ignore", invalid="ignore"):
            AH = A_hat @ H
            S = AH @ W
        H = np.maximum(S, 0.0) if act == "relu" else S
        if not np.all(np.isfinite(H)):
            raise NumericError(f"non-finite activations in layer {ell}")
        cache.append((AH, S))
    return H, cache


def encode(A_hat, X, params: GaeParams, config: EncoderConfig) -> np.ndarray:
    """Embedding ``Z`` produced by the stacked graph convolutions."""
    return _forward(A_hat, X, params, config)[0]


def _log_decode(Z):
    negd = -pairwise_sq_distances(Z)
    return negd - logsumexp(negd, axis=1, keepdims=True)


def decode(Z) -> np.ndarray:
    """Row-stochastic reconstruction ``Q`` from embedding distances."""
    Z = np.asarray(Z, dtype=np.float64)
    if not np.all(np.isfinite(Z)):
        raise InvalidInputError("embedding contains non-finite values")
    negd = -pairwise_sq_distances(Z)
    # Row max of -d is the zero self-distance, so this is already stabilised.
    E = np.exp(negd - negd.max(axis=1, keepdims=True))
    return E / E.sum(axis=1, keepdims=True)


def _edge_sum(M, Z):
    """``0.5 * sum_ij M_ij ||z_i - z_j||^2`` over off-diagonal entries of sparse M."""
    M = sp.coo_matrix(M)
    off = M.row != M.col
    r, c, w = M.row[off], M.col[off], M.data[off]
    diff = Z[r] - Z[c]
    return 0.5 * float(np.dot(w, np.einsum("ij,ij->i", diff, diff)))


def smoothness(Z, L_tilde) -> float:
    """``tr(Z^T L Z)``, evaluated as a sum over edges so constant rows give exactly 0."""
    L = sp.csr_matrix(L_tilde)
    return _edge_sum(-L, np.asarray(Z, dtype=np.float64))


def _cross_entropy_from_log(P, logQ):
    P = sp.coo_matrix(P)
    lq = logQ[P.row, P.col]
    if np.any(~np.isfinite(lq)):
        raise NumericError("reconstruction assigns zero probability to a target edge")
    return -float(np.dot(P.data, lq))


def loss(P, Q, Z, L_tilde, lam) -> LossValue:
    """Cross entropy ``sum P log(1/Q)`` plus ``lam * tr(Z^T L Z)``.

    Entries with ``P_ij = 0`` contribute nothing regardless of ``Q_ij``.
    """
    P = sp.coo_matrix(P)
    Q = np.asarray(Q, dtype=np.float64)
    q = Q[P.row, P.col]
    mask = P.data > 0
    if np.any(q[mask] <= 0):
        raise NumericError("Q is zero where P is positive")
    ce = -float(np.dot(P.data[mask], np.log(q[mask])))
    tr = smoothness(Z, L_tilde)
    return LossValue(ce + lam * tr, ce, tr)


def objective(P, X, A_hat, L_tilde, params, config, lam) -> LossValue:
    """Forward pass and loss in one call (log-domain decoder)."""
    Z, _ = _forward(A_hat, X, params, config)
    ce = _cross_entropy_from_log(P, _log_decode(Z))
    tr = smoothness(Z, L_tilde)
    return LossValue(ce + lam * tr, ce, tr)


def _value_and_grad(P, X, A_hat, L_tilde, params, config, lam):
    Z, cache = _forward(A_hat, X, params, config)
    logQ = _log_decode(Z)
    ce = _cross_entropy_from_log(P, logQ)
    L = sp.csr_matrix(L_tilde)
    tr = smoothness(Z, L)

    # d CE / d dist_ij = P_ij - r_i Q_ij with r_i the row mass of P.
    Pd = np.asarray(sp.csr_matrix(P).todense())
    G = Pd - Pd.sum(axis=1, keepdims=True) * np.exp(logQ)
    S = G + G.T
    dZ = 2.0 * (S.sum(axis=1)[:, None] * Z - S @ Z)
    if lam:
        dZ += 2.0 * lam * (L @ Z)

    grads = [None] * len(params.weights)
    dH = dZ
    for ell in range(len(params.weights) - 1, -1, -1):
        AH, S_pre = cache[ell]
        dS = dH * (S_pre > 0) if config.activations[ell] == "relu" else dH
        g = AH.T @ dS
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in layer {ell}")
        grads[ell] = g
        if ell:
            dH = A_hat @ (dS @ params.weights[ell].T)
    return LossValue(ce + lam * tr, ce, tr), grads


def gradients(P, X, A_hat, L_tilde, params, config, lam) -> list:
    """Gradient of the total loss with respect to every layer's weights."""
    return _value_and_grad(P, X, A_hat, L_tilde, params, config, lam)[1]


@dataclass
class FitResult:
    params: GaeParams
    losses: list
    converged: bool
    n_iter: int


def fit(P, X, A_hat, L_tilde, params, config, lam, lr, max_iters, tol=1e-6,
        optimizer="gd", betas=(0.9, 0.999), eps=1e-8) -> FitResult:
    """Full-batch training of the encoder weights.

    ``optimizer="gd"`` takes fixed steps of size ``lr``; ``"adam"`` uses
    adaptive moment estimates. Stops once the relative loss change drops
    below ``tol`` or after ``max_iters`` updates. ``params`` is not modified.
    """
    if lr <= 0:
        raise ConfigError(f"lr must be positive, got {lr}")
    if int(max_iters) != max_iters or max_iters < 1:
        raise ConfigError(f"max_iters must be an integer >= 1, got {max_iters}")
    if optimizer not in ("gd", "adam"):
        raise ConfigError(f"unknown optimizer {optimizer!r}")
    params = params.copy()
    m = [np.zeros_like(W) for W in params.weights]
    v = [np.zeros_like(W) for W in params.weights]
    losses = []
    converged = False
    it = 0
    for it in range(1, int(max_iters) + 1):
        try:
            val, grads = _value_and_grad(P, X, A_hat, L_tilde, params, config, lam)
        except NumericError as exc:
            raise DivergenceError(it, lr, f"iteration {it} (lr={lr:g}): {exc}") from exc
        if not np.isfinite(val.total):
            raise DivergenceError(it, lr)
        losses.append(val.total)
        if len(losses) > 1:
            prev = losses[-2]
            if abs(val.total - prev) / max(1.0, abs(prev)) < tol:
                converged = True
                break
        for ell, g in enumerate(grads):
            if optimizer == "gd":
                params.weights[ell] -= lr * g
            else:
                m[ell] = betas[0] * m[ell] + (1 - betas[0]) * g
                v[ell] = betas[1] * v[ell] + (1 - betas[1]) * g * g
                mhat = m[ell] / (1 - betas[0] ** it)
                vhat = v[ell] / (1 - betas[1] ** it)
                params.weights[ell] -= lr * mhat / (np.sqrt(vhat) + eps)
    return FitResult(params, losses, converged, it)
