"""Sparse connectivity distributions and the weighted graphs built from them.

Each node's outgoing distribution solves a simplex-constrained quadratic
problem (expected distance plus a per-node ridge penalty) whose solution is
available in closed form once the penalty is tied to the neighbour count k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DegenerateGraphError, InvalidInputError


def pairwise_sq_distances(Z) -> np.ndarray:
    """Squared Euclidean distances between all rows of ``Z``.

    The result is exactly symmetric with a zero diagonal; small negative
    values from cancellation are clamped to zero.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[:, None]
    if Z.ndim != 2 or Z.shape[0] < 2:
        raise InvalidInputError(f"expected an (n, m) matrix with n >= 2, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise InvalidInputError("input contains non-finite values")
    sq = np.einsum("ij,ij->i", Z, Z)
    D = sq[:, None] + sq[None, :] - 2.0 * (Z @ Z.T)
    D = 0.5 * (D + D.T)
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def _check_k(k, n):
    if isinstance(k, bool) or int(k) != k:
        raise ConfigError(f"k must be an integer, got {k!r}")
    if not 2 <= k <= n - 1:
        raise ConfigError(f"k must satisfy 2 <= k <= n-1 = {n - 1}, got {k}")
    return int(k)


def _ranked(row, self_index):
    # Ascending by distance; the node itself first, remaining ties by index.
    order = np.argsort(row, kind="stable")
    if self_index is not None:
        order = np.concatenate(([self_index], order[order != self_index]))
    return order


def compute_gamma(row, self_index, k) -> float:
    """Ridge weight that makes the optimal distribution exactly k-sparse.

    ``0.5 * (k * d[k] - sum(d[:k]))`` over the ascending distances ``d``,
    with the zero self-distance counted in the ranking.
    """
    row = np.asarray(row, dtype=np.float64)
    k = _check_k(k, row.size)
    d = row[_ranked(row, self_index)]
    return 0.5 * (k * d[k] - d[:k].sum())


def _solve_sorted(d, k):
    """Closed-form probabilities for the k smallest of ascending ``d``."""
    gaps = d[k] - d[:k]
    denom = gaps.sum()
    if denom <= 0.0:
        return np.full(k, 1.0 / k)
    return gaps / denom


def solve_connectivity_row(row, self_index, k) -> np.ndarray:
    """Optimal k-sparse connectivity row for one node as a dense vector.

    ``p_j = (d_(k+1) - d_j)_+ / sum_{v<=k} (d_(k+1) - d_(v))``; support is the
    k nearest nodes (self first, ties by index). When the k+1 smallest
    distances coincide the row is uniform over the k selected nodes.
    """
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise InvalidInputError("row must be one-dimensional")
    if np.isnan(row).any():
        raise InvalidInputError("distance row contains NaN")
    k = _check_k(k, row.size)
    order = _ranked(row, self_index)
    p = np.zeros_like(row)
    p[order[:k]] = _solve_sorted(row[order], k)
    return p


def build_distribution(D, k) -> sp.csr_matrix:
    """Row-wise connectivity distributions as a CSR matrix (row i = p(.|v_i))."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidInputError(f"distance matrix must be square, got {D.shape}")
    n = D.shape[0]
    k = _check_k(k, n)
    bad = np.flatnonzero(np.isnan(D).any(axis=1))
    if bad.size:
        raise InvalidInputError(f"row {bad[0]}: distance row contains NaN")

    # Rank with the diagonal forced to the front so the self-loop is always kept.
    key = D.copy()
    np.fill_diagonal(key, -np.inf)
    order = np.argsort(key, axis=1, kind="stable")[:, : k + 1]
    d = np.take_along_axis(D, order, axis=1)
    d[:, 0] = np.diag(D)
    gaps = d[:, k : k + 1] - d[:, :k]
    denom = gaps.sum(axis=1)
    vals = np.empty((n, k))
    flat = denom <= 0.0
    vals[~flat] = gaps[~flat] / denom[~flat, None]
    vals[flat] = 1.0 / k

    indptr = np.arange(0, n * k + 1, k)
    P = sp.csr_matrix((vals.ravel(), order[:, :k].ravel(), indptr), shape=(n, n))
    P.eliminate_zeros()
    P.sort_indices()
    return P


@dataclass
class WeightedGraph:
    """Symmetric adjacency with self-loops plus its derived operators."""

    adjacency: sp.csr_matrix
    degrees: np.ndarray
    normalized: sp.csr_matrix | None = None
    laplacian: sp.csr_matrix | None = None

    @property
    def n(self):
        return self.adjacency.shape[0]


def symmetrize(P) -> WeightedGraph:
    """Undirected graph ``(P + P^T) / 2`` with degrees, normalization and Laplacian."""
    P = sp.csr_matrix(P, dtype=np.float64)
    A = ((P + P.T) * 0.5).tocsr()
    A.sort_indices()
    deg = np.asarray(A.sum(axis=1)).ravel()
    if np.any(deg <= 0):
        raise DegenerateGraphError(
            f"node {int(np.flatnonzero(deg <= 0)[0])} has zero degree after symmetrization"
        )
    W = WeightedGraph(adjacency=A, degrees=deg)
    W.laplacian = (sp.diags(deg) - A).tocsr()
    normalize(W)
    return W


def normalize(W: WeightedGraph) -> WeightedGraph:
    """Fill ``W.normalized`` with ``D^{-1/2} A D^{-1/2}``."""
    deg = np.asarray(W.degrees, dtype=np.float64)
    if np.any(deg <= 0):
        raise DegenerateGraphError("cannot normalize a graph with zero-degree nodes")
    s = 1.0 / np.sqrt(deg)
    A = sp.csr_matrix(W.adjacency, dtype=np.float64)
    An = sp.diags(s) @ A @ sp.diags(s)
    An = An.tocsr()
    # Exact symmetry despite rounding in the two-sided scaling.
    An = ((An + An.T) * 0.5).tocsr()
    An.sort_indices()
    W.normalized = An
    return W


def graph_from_adjacency(A) -> WeightedGraph:
    """Wrap an already-symmetric adjacency (dense or sparse) as a WeightedGraph."""
    A = sp.csr_matrix(A, dtype=np.float64)
    deg = np.asarray(A.sum(axis=1)).ravel()
    W = WeightedGraph(adjacency=A, degrees=deg)
    W.laplacian = (sp.diags(deg) - A).tocsr()
    return normalize(W)


def build_graph(Z, k) -> tuple[sp.csr_matrix, WeightedGraph]:
    """Distances, sparse distribution and weighted graph from a point set."""
    P = build_distribution(pairwise_sq_distances(Z), k)
    return P, symmetrize(P)


def weight_dispersion(A) -> float:
    """Coefficient of variation of the nonzero off-diagonal adjacency weights."""
    A = sp.coo_matrix(A)
    off = A.data[(A.row != A.col) & (A.data > 0)]
    if off.size == 0 or off.mean() == 0:
        return 0.0
    return float(off.std() / off.mean())
