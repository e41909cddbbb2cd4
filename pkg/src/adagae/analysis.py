"""Numerical checks of the sparsity, degeneration, entropy and spectrum results.

Every check builds random instances, gates on the result's own premises, and
only counts a violation on premise-satisfying instances. Reference solutions
come from generic iterative solvers (projected gradient on the simplex,
entropic mirror descent, a dense symmetric eigensolver) that share no code
with the closed forms they are checked against.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from . import gae
from .errors import ConfigError
from .graph import build_distribution, pairwise_sq_distances, symmetrize, weight_dispersion

# --------------------------------------------------------------------------
# reference solvers


def project_simplex(V, iters=80):
    """Euclidean projection of each row of ``V`` onto the probability simplex.

    The threshold is located by bisection on ``sum(max(v - t, 0)) = 1``.
    """
    V = np.atleast_2d(np.asarray(V, dtype=np.float64))
    lo = V.min(axis=1) - 1.0
    hi = V.max(axis=1)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        s = np.maximum(V - mid[:, None], 0.0).sum(axis=1)
        above = s > 1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return np.maximum(V - (0.5 * (lo + hi))[:, None], 0.0)


def simplex_qp(D, gamma, iters=200, tol=1e-15):
    """Minimize ``p.d + gamma * ||p||^2`` over the simplex, row by row, by projected gradient.

    ``D`` is (m, n) and ``gamma`` broadcastable to (m,). Step size is half the
    inverse Lipschitz constant, giving a contraction factor of 1/2 per step.
    """
    D = np.atleast_2d(np.asarray(D, dtype=np.float64))
    gamma = np.broadcast_to(np.asarray(gamma, dtype=np.float64), (D.shape[0],))[:, None]
    if np.any(gamma <= 0):
        raise ConfigError("simplex_qp needs gamma > 0")
    step = 1.0 / (4.0 * gamma)
    P = np.full(D.shape, 1.0 / D.shape[1])
    for _ in range(iters):
        new = project_simplex(P - step * (D + 2.0 * gamma * P))
        done = np.max(np.abs(new - P)) <= tol
        P = new
        if done:
            break
    return P


def qp_objective(p, d, gamma):
    p = np.asarray(p, dtype=np.float64)
    return p @ np.asarray(d) + gamma * p @ p


def entropic_objective(q, d):
    """``sum q_j d_j + sum q_j log q_j`` (expected distance minus entropy)."""
    q = np.asarray(q, dtype=np.float64)
    nz = q > 0
    return float(q @ d + np.sum(q[nz] * np.log(q[nz])))


def mirror_descent(d, step=0.5, iters=400):
    """Entropic mirror descent on the simplex for ``entropic_objective``."""
    d = np.asarray(d, dtype=np.float64)
    logq = np.full(d.shape, -np.log(d.size))
    for _ in range(iters):
        grad = d + logq + 1.0
        logq = logq - step * grad
        logq -= logq.max()
        logq -= np.log(np.exp(logq).sum())
    return np.exp(logq)


# --------------------------------------------------------------------------
# reports


@dataclass
class TheoremReport:
    theorem: str
    instances: int
    violations: int
    premise_failures: int = 0
    worst_margin: float = float("inf")
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0 and self.instances > self.premise_failures

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def gamma_interval(d_sorted, k):
    """Open-closed interval of ridge weights giving an exactly k-sparse optimum."""
    head = d_sorted[:k].sum()
    return 0.5 * (k * d_sorted[k - 1] - head), 0.5 * (k * d_sorted[k] - head)


def _random_rows(rng, m, n):
    D = rng.uniform(0.0, 1.0, size=(m, n))
    D[:, 0] = 0.0
    return D


def verify_sparsity(trials=100, n=30, k_range=(2, 5, 10), seed=0, nz_tol=1e-10) -> TheoremReport:
    """Ridge weights strictly inside the interval give exactly k nonzeros.

    Also checks that a weight inside the (k-1) interval yields k-1 nonzeros.
    """
    k_range = list(k_range)
    if any(not 2 <= k <= n - 1 for k in k_range):
        raise ConfigError(f"k_range must lie in [2, {n - 1}]")
    rng = np.random.default_rng(seed)
    D = _random_rows(rng, trials, n)
    ks = np.array([k_range[t % len(k_range)] for t in range(trials)])
    inside = np.empty(trials)
    below = np.empty(trials)
    premise = np.ones(trials, dtype=bool)
    for t in range(trials):
        ds = np.sort(D[t])
        k = ks[t]
        premise[t] = np.all(np.diff(ds) > 0)
        lo, hi = gamma_interval(ds, k)
        inside[t] = lo + rng.uniform(0.01, 0.99) * (hi - lo)
        lo1, hi1 = gamma_interval(ds, k - 1)
        below[t] = lo1 + rng.uniform(0.01, 0.99) * (hi1 - lo1)
        premise[t] &= lo < hi and lo1 < hi1 and lo1 >= 0 and below[t] > 0
    P_in = simplex_qp(D, inside)
    P_below = simplex_qp(D, below)
    nnz_in = (P_in > nz_tol).sum(axis=1)
    nnz_below = (P_below > nz_tol).sum(axis=1)
    bad_in = premise & (nnz_in != ks)
    bad_below = premise & (nnz_below != ks - 1)
    # Margin: smallest retained probability (how far the k-th entry is from zero).
    kth = np.array([np.sort(P_in[t])[::-1][ks[t] - 1] for t in range(trials)])
    return TheoremReport(
        theorem="1",
        instances=trials,
        violations=int(bad_in.sum() + bad_below.sum()),
        premise_failures=int((~premise).sum()),
        worst_margin=float(kth[premise].min()) if premise.any() else float("nan"),
        params={"trials": trials, "n": n, "k_range": k_range, "seed": seed},
        details={"exact_k": int((premise & ~bad_in).sum()), "below_k_minus_1": int((premise & ~bad_below).sum())},
    )


def closed_form_vs_oracle(trials=100, n=50, k_range=(2, 5, 10, 20), seed=0):
    """Compare the closed-form row solution with the QP oracle at the tuned ridge weight.

    Returns ``(max objective gap, max entrywise difference)`` over all trials.
    """
    from .graph import compute_gamma, solve_connectivity_row

    rng = np.random.default_rng(seed)
    D = _random_rows(rng, trials, n)
    ks = [k_range[t % len(k_range)] for t in range(trials)]
    gammas = np.array([compute_gamma(D[t], 0, ks[t]) for t in range(trials)])
    oracle = simplex_qp(D, gammas)
    gap = diff = 0.0
    for t in range(trials):
        p = solve_connectivity_row(D[t], 0, ks[t])
        gap = max(gap, qp_objective(p, D[t], gammas[t]) - qp_objective(oracle[t], D[t], gammas[t]))
        diff = max(diff, float(np.max(np.abs(p - oracle[t]))))
    return gap, diff


# --------------------------------------------------------------------------
# degeneration probe


def degeneration_bound(k, epsilon):
    """Upper bound on the spread of the rebuilt distribution for reconstruction error epsilon."""
    a = np.sqrt(epsilon) - epsilon
    return (1.0 / k) / (np.log(epsilon) / np.log(a) - 1.0)


def _stacked_simplices(rng, groups, k, jitter, separation):
    # Regular simplices with unit edges stacked along an extra axis. With separation sqrt(2)
    # the nearest outside point is at squared distance 2, so every target row is
    # (2, 1, ..., 1) / (k + 1): non-uniform, identical across nodes, and exactly
    # reproducible by a softmax-of-distances embedding.
    X = np.zeros((groups * k, k + 1))
    for g in range(groups):
        X[g * k:(g + 1) * k, :k] = np.eye(k) / np.sqrt(2.0)
        X[g * k:(g + 1) * k, k] = g * separation
    return X + jitter * rng.standard_normal(X.shape)


def _premise_rows(P, Q, epsilon, k):
    Pd = P.toarray()
    close = np.max(np.abs(Q - Pd), axis=1) <= epsilon
    kth = -np.sort(-Pd, axis=1)[:, k - 1]
    strong = kth >= np.sqrt(epsilon)
    return close, strong


def probe_degeneration(n=40, k=5, epsilon=1e-4, seed=0, hidden=16, jitter=1e-4,
                       separation=np.sqrt(2.0), lr=0.5, max_iters=20000,
                       distance="unsquared") -> TheoremReport:
    """Train a small auto-encoder at fixed k until it reconstructs within epsilon, then rebuild.

    The encoder is a single linear graph convolution on one-hot node features,
    trained by fixed-step gradient descent on the cross-entropy loss, so the
    check catches the first iterate that meets the tolerance. Rows whose reconstruction
    error exceeds ``epsilon`` or whose k-th largest target probability is
    below ``sqrt(epsilon)`` are excluded. For the remaining rows the
    distribution is rebuilt at sparsity ``k`` from embedding distances
    (unsquared by default) and the spread ``max - min`` over its k support
    entries is compared against :func:`degeneration_bound`.
    """
    if not 0 < epsilon < 0.25:
        raise ConfigError("epsilon must lie in (0, 1/4)")
    if k < 2:
        raise ConfigError("k must be >= 2")
    groups = max(2, n // k)
    rng = np.random.default_rng(seed)
    X = _stacked_simplices(rng, groups, k, jitter, separation)
    n = X.shape[0]
    P = build_distribution(pairwise_sq_distances(X), k)
    W = symmetrize(P)
    feats = np.eye(n)
    cfg = gae.EncoderConfig([hidden], ["linear"], seed=seed)
    params = gae.init_params(cfg, n, rng)
    W0 = params.weights[0]
    rounds = 0
    for rounds in range(max_iters + 1):
        close, strong = _premise_rows(P, gae.decode(W.normalized @ W0), epsilon, k)
        if np.all(close | ~strong):
            break
        _, grads = gae._value_and_grad(P, feats, W.normalized, W.laplacian,
                                       gae.GaeParams([W0]), cfg, 0.0)
        W0 = W0 - lr * grads[0]
    Z = W.normalized @ W0
    close, strong = _premise_rows(P, gae.decode(Z), epsilon, k)
    ok = close & strong

    Dz = pairwise_sq_distances(Z)
    if distance == "unsquared":
        Dz = np.sqrt(Dz)
    P_hat = build_distribution(Dz, k).toarray()
    top = -np.sort(-P_hat, axis=1)[:, :k]
    spread = top[:, 0] - top[:, k - 1]
    bound = degeneration_bound(k, epsilon)
    viol = ok & (spread > bound)
    return TheoremReport(
        theorem="2",
        instances=n,
        violations=int(viol.sum()),
        premise_failures=int((~ok).sum()),
        worst_margin=float(np.min(bound - spread[ok])) if ok.any() else float("nan"),
        params={"n": n, "k": k, "epsilon": epsilon, "seed": seed, "distance": distance},
        details={
            "bound": float(bound),
            "max_spread": float(spread[ok].max()) if ok.any() else float("nan"),
            "median_spread": float(np.median(spread[ok])) if ok.any() else float("nan"),
            "rounds": rounds,
            "inconclusive": bool(not ok.any()),
            "reconstruction_error": float(np.max(np.abs(gae.decode(Z) - P.toarray()))),
        },
    )


def degeneration_sweep(epsilons=(1e-2, 1e-3, 1e-4), seeds=range(5), **kw):
    """Median (over seeds) of the worst rebuilt spread, per epsilon."""
    out = {}
    for eps in epsilons:
        reps = [probe_degeneration(epsilon=eps, seed=s, **kw) for s in seeds]
        spreads = [r.details["max_spread"] for r in reps if not r.details["inconclusive"]]
        out[eps] = {
            "median_max_spread": float(np.median(spreads)) if spreads else float("nan"),
            "violations": sum(r.violations for r in reps),
            "premise_passing": sum(r.instances - r.premise_failures for r in reps),
        }
    return out


# --------------------------------------------------------------------------
# entropy equivalence


def verify_entropy_equivalence(trials=50, n=20, seed=0, tol=1e-8) -> TheoremReport:
    """Softmax of negative distances minimizes expected distance minus entropy."""
    rng = np.random.default_rng(seed)
    worst = float("inf")
    bad = 0
    for _ in range(trials):
        d = rng.uniform(0.0, 5.0, size=n)
        d[0] = 0.0
        e = np.exp(-(d - d.min()))
        soft = e / e.sum()
        ref = mirror_descent(d)
        margin = entropic_objective(ref, d) + tol - entropic_objective(soft, d)
        worst = min(worst, margin)
        bad += margin < 0
    return TheoremReport("3", trials, int(bad), 0, worst, {"trials": trials, "n": n, "seed": seed})


# --------------------------------------------------------------------------
# spectrum


def random_connected_graph(rng, n, density=0.2):
    """Symmetric nonnegative weights on a random spanning tree plus extra edges, positive diagonal."""
    A = np.zeros((n, n))
    for i in range(1, n):
        j = rng.integers(i)
        A[i, j] = A[j, i] = rng.uniform(0.1, 1.0)
    extra = np.triu(rng.random((n, n)) < density, 1)
    w = np.triu(rng.uniform(0.1, 1.0, size=(n, n)), 1) * extra
    A = np.maximum(A, w + w.T)
    A[np.diag_indices(n)] = rng.uniform(0.1, 1.0, size=n)
    return A


def normalized_laplacian_spectrum(A):
    A = np.asarray(A, dtype=np.float64)
    deg = A.sum(axis=1)
    if np.any(deg <= 0):
        raise ConfigError("graph has a zero-degree node")
    s = 1.0 / np.sqrt(deg)
    M = np.eye(len(A)) - s[:, None] * A * s[None, :]
    return np.linalg.eigvalsh(0.5 * (M + M.T))


def spectrum_pair(A):
    """Eigenvalues of ``I - A_hat`` with and without the self-loops."""
    A = np.asarray(A, dtype=np.float64)
    A_off = A - np.diag(np.diag(A))
    return normalized_laplacian_spectrum(A), normalized_laplacian_spectrum(A_off)


def verify_spectrum(trials=50, n=20, seed=0, zero_tol=1e-8, gap_tol=1e-10) -> TheoremReport:
    """Self-loops keep the smallest eigenvalue at 0 and shrink the largest."""
    rng = np.random.default_rng(seed)
    bad = regenerated = 0
    worst = float("inf")
    for _ in range(trials):
        while True:
            A = random_connected_graph(rng, n)
            if np.all((A - np.diag(np.diag(A))).sum(axis=1) > 0):
                break
            regenerated += 1
        lam, lam_off = spectrum_pair(A)
        gap = lam_off[-1] - lam[-1]
        ok = abs(lam[0]) <= zero_tol and abs(lam_off[0]) <= zero_tol and gap > gap_tol
        bad += not ok
        worst = min(worst, gap)
    return TheoremReport("4", trials, int(bad), 0, float(worst),
                         {"trials": trials, "n": n, "seed": seed},
                         {"regenerated": regenerated})


# --------------------------------------------------------------------------
# collapse diagnostics


def collapse_trace(adaptive, fixed, truth=None):
    """Side-by-side per-epoch weight dispersion and final metrics of two runs.

    ``adaptive`` and ``fixed`` are RunResult objects (or anything with
    ``.epochs`` and ``.labels``) from the same data and seed, the second
    with the sparsity frozen.
    """
    from .metrics import accuracy, nmi

    if len(adaptive.epochs) != len(fixed.epochs):
        raise ConfigError("runs have different numbers of epochs")
    if len(adaptive.labels) != len(fixed.labels):
        raise ConfigError("runs cover different numbers of samples")
    rows = [
        {"epoch": a.epoch, "k_adaptive": a.k, "k_fixed": f.k,
         "dispersion_adaptive": a.dispersion, "dispersion_fixed": f.dispersion}
        for a, f in zip(adaptive.epochs, fixed.epochs)
    ]
    report = {"epochs": rows}
    if truth is not None:
        report["adaptive"] = {"acc": accuracy(truth, adaptive.labels), "nmi": nmi(truth, adaptive.labels)}
        report["fixed"] = {"acc": accuracy(truth, fixed.labels), "nmi": nmi(truth, fixed.labels)}
    return report


def dispersion(A):
    """Coefficient of variation of the nonzero off-diagonal weights of ``A``."""
    return weight_dispersion(sp.csr_matrix(A))
