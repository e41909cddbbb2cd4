"""Clustering accuracy under optimal label matching, and normalized mutual information."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError


def _pair(truth, pred):
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape != pred.shape:
        raise InvalidInputError(f"label vectors differ in length: {truth.size} vs {pred.size}")
    if truth.size == 0:
        raise InvalidInputError("label vectors are empty")
    return truth, pred


def contingency(truth, pred):
    """Co-occurrence counts, rows indexed by true class, columns by predicted cluster."""
    truth, pred = _pair(truth, pred)
    _, t = np.unique(truth, return_inverse=True)
    _, p = np.unique(pred, return_inverse=True)
    C = np.zeros((t.max() + 1, p.max() + 1), dtype=np.int64)
    np.add.at(C, (t, p), 1)
    return C


def accuracy(truth, pred) -> float:
    """Fraction of samples correctly labelled under the best one-to-one label mapping."""
    C = contingency(truth, pred)
    m = max(C.shape)
    padded = np.zeros((m, m), dtype=np.int64)
    padded[: C.shape[0], : C.shape[1]] = C
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum() / C.sum())


def nmi(truth, pred) -> float:
    """Mutual information normalized by the geometric mean of the two entropies (natural log)."""
    C = contingency(truth, pred).astype(np.float64)
    n = C.sum()
    pt = C.sum(axis=1) / n
    pp = C.sum(axis=0) / n
    ht = -np.sum(pt * np.log(pt))
    hp = -np.sum(pp * np.log(pp))
    if ht == 0.0 or hp == 0.0:
        return 1.0 if ht == hp else 0.0
    pij = C / n
    nz = pij > 0
    mi = np.sum(pij[nz] * np.log(pij[nz] / np.outer(pt, pp)[nz]))
    return float(max(mi, 0.0) / np.sqrt(ht * hp))
