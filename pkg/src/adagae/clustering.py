"""Final assignment backends: k-means on an embedding, spectral clustering on a graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, NumericError


@dataclass
class ClusteringResult:
    labels: np.ndarray
    objective: float
    backend: str
    n_clusters: int

    @property
    def occupied(self):
        return int(np.unique(self.labels).size)


def _sq_dist_to(X, C):
    d = (X * X).sum(1)[:, None] + (C * C).sum(1)[None, :] - 2.0 * X @ C.T
    return np.maximum(d, 0.0)


def _greedy_dsquared_seeds(X, c, rng, n_trials=None):
    """Greedy D^2 seeding: sample several candidates per step, keep the best."""
    n = X.shape[0]
    if n_trials is None:
        n_trials = 2 + int(np.log(c))
    centers = np.empty((c, X.shape[1]))
    first = rng.integers(n)
    centers[0] = X[first]
    closest = _sq_dist_to(X, centers[:1]).ravel()
    for j in range(1, c):
        pot = closest.sum()
        if pot > 0:
            cand = rng.choice(n, size=n_trials, p=closest / pot)
        else:
            cand = rng.integers(n, size=n_trials)
        dc = np.minimum(closest[None, :], _sq_dist_to(X, X[cand]).T)
        best = int(np.argmin(dc.sum(axis=1)))
        centers[j] = X[cand[best]]
        closest = dc[best]
    return centers


def _lloyd(X, centers, max_iters, tol, history=None):
    centers = centers.copy()
    c = centers.shape[0]
    labels = None
    for _ in range(max_iters):
        d = _sq_dist_to(X, centers)
        new_labels = d.argmin(axis=1)
        wcss = float(d[np.arange(len(X)), new_labels].sum())
        if history is not None:
            history.append(wcss)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=c)
        old = centers
        centers = np.zeros_like(old)
        np.add.at(centers, labels, X)
        nz = counts > 0
        centers[nz] /= counts[nz, None]
        empty = np.flatnonzero(~nz)
        if empty.size:
            # Reseed each empty cluster at the point farthest from its assigned center.
            far = np.argsort(-d[np.arange(len(X)), labels], kind="stable")
            for j, idx in zip(empty, far):
                centers[j] = X[idx]
        if empty.size == 0 and np.sum((centers - old) ** 2) <= tol:
            d = _sq_dist_to(X, centers)
            labels = d.argmin(axis=1)
            wcss = float(d[np.arange(len(X)), labels].sum())
            if history is not None:
                history.append(wcss)
            break
    d = _sq_dist_to(X, centers)
    labels = d.argmin(axis=1)
    return labels, float(d[np.arange(len(X)), labels].sum()), centers


def kmeans(Z, c, seed=0, restarts=10, max_iters=300, tol=1e-12, history=None) -> ClusteringResult:
    """Lloyd's algorithm with greedy D^2 seeding; best of ``restarts`` by WCSS.

    ``history``, if given, receives one list of per-iteration WCSS values per restart.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[:, None]
    n = Z.shape[0]
    if not 1 <= c <= n:
        raise ConfigError(f"number of clusters must be in [1, {n}], got {c}")
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        trace = [] if history is not None else None
        init = _greedy_dsquared_seeds(Z, c, rng)
        labels, wcss, _ = _lloyd(Z, init, max_iters, tol, trace)
        if history is not None:
            history.append(trace)
        if best is None or wcss < best[1]:
            best = (labels, wcss)
    return ClusteringResult(best[0], best[1], "kmeans", c)


def spectral_embedding(A_hat, c) -> np.ndarray:
    """Eigenvectors of ``I - A_hat`` for the ``c`` smallest eigenvalues, rows unit-normalized."""
    M = A_hat.toarray() if sp.issparse(A_hat) else np.asarray(A_hat, dtype=np.float64)
    M = 0.5 * (M + M.T)
    n = M.shape[0]
    try:
        _, vecs = np.linalg.eigh(np.eye(n) - M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    U = vecs[:, :c]
    norms = np.linalg.norm(U, axis=1, keepdims=True)
    return np.divide(U, norms, out=np.zeros_like(U), where=norms > 0)


def spectral_clustering(A_hat, c, seed=0, restarts=10) -> ClusteringResult:
    """Normalized spectral clustering of a graph given its normalized adjacency."""
    n = A_hat.shape[0]
    if not 1 <= c <= n:
        raise ConfigError(f"number of clusters must be in [1, {n}], got {c}")
    U = spectral_embedding(A_hat, c)
    km = kmeans(U, c, seed=seed, restarts=restarts)
    M = A_hat.toarray() if sp.issparse(A_hat) else np.asarray(A_hat)
    # Normalized cut of the partition with respect to the normalized graph.
    cut = 0.0
    for j in range(c):
        idx = km.labels == j
        vol = M[idx].sum()
        if vol > 0:
            cut += M[np.ix_(idx, ~idx)].sum() / vol
    return ClusteringResult(km.labels, float(cut), "spectral", c)
