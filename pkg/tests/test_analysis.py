import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from adagae import analysis
from adagae.errors import ConfigError
from adagae.graph import compute_gamma, solve_connectivity_row


# oracles against hand values

def test_project_simplex_known_points():
    np.testing.assert_allclose(analysis.project_simplex(np.array([[0.5, 0.5]])), [[0.5, 0.5]], atol=1e-14)
    np.testing.assert_allclose(analysis.project_simplex(np.array([[2.0, 0.0]])), [[1.0, 0.0]], atol=1e-14)
    np.testing.assert_allclose(analysis.project_simplex(np.array([[1.0, 1.0, 1.0]])), [[1 / 3] * 3], atol=1e-14)


@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(2, 10)), elements=st.floats(-10, 10)))
def test_project_simplex_feasible_and_closest(V):
    Pr = analysis.project_simplex(V)
    assert np.all(Pr >= 0)
    np.testing.assert_allclose(Pr.sum(1), 1, atol=1e-10)
    # the projection is no farther than any vertex of the simplex
    for v, p in zip(V, Pr):
        dist = np.linalg.norm(v - p)
        for e in np.eye(len(v)):
            assert dist <= np.linalg.norm(v - e) + 1e-9


def test_qp_oracle_hand_example():
    d = np.array([0.0, 1, 2, 3, 9])
    q = analysis.simplex_qp(d[None, :], np.array([1.5]))[0]
    np.testing.assert_allclose(q, [2 / 3, 1 / 3, 0, 0, 0], atol=1e-8)


def test_mirror_descent_hand_example():
    q = analysis.mirror_descent(np.array([0.0, math.log(3)]))
    np.testing.assert_allclose(q, [0.75, 0.25], atol=1e-8)
    np.testing.assert_allclose(analysis.mirror_descent(np.full(4, 2.5)), 0.25, atol=1e-12)


# sparsity

def test_gamma_interval_matches_compute_gamma():
    d = np.array([0.0, 1, 2, 3, 9])
    lo, hi = analysis.gamma_interval(d, 2)
    assert hi == pytest.approx(compute_gamma(d, 0, 2))
    assert lo == pytest.approx(0.5 * (2 * 1 - 1))


def test_verify_sparsity_small():
    rep = analysis.verify_sparsity(trials=20, n=15, k_range=(2, 4), seed=3)
    assert rep.violations == 0 and rep.passed
    assert rep.instances == 20
    assert rep.details["exact_k"] == 20 - rep.premise_failures
    assert rep.details["below_k_minus_1"] == 20 - rep.premise_failures


def test_closed_form_vs_oracle_small():
    gap, diff = analysis.closed_form_vs_oracle(trials=20, n=20, k_range=(2, 5), seed=4)
    assert gap <= 1e-8 and diff <= 1e-6


def test_upper_endpoint_matches_closed_form(rng):
    for _ in range(10):
        d = np.concatenate([[0.0], np.sort(rng.uniform(size=19))])
        gamma = compute_gamma(d, 0, 5)
        q = analysis.simplex_qp(d[None, :], np.array([gamma]))[0]
        np.testing.assert_allclose(q, solve_connectivity_row(d, 0, 5), atol=1e-8)


# degeneration

def test_bound_value():
    eps = 1e-4
    expected = 0.2 / (math.log(eps) / math.log(math.sqrt(eps) - eps) - 1)
    assert analysis.degeneration_bound(5, eps) == pytest.approx(expected)
    assert 0.19 < analysis.degeneration_bound(5, eps) < 0.21


def test_bound_tends_to_one_over_k():
    assert analysis.degeneration_bound(5, 1e-300) == pytest.approx(0.2, rel=1e-2)


def test_stacked_simplices_targets():
    rng = np.random.default_rng(0)
    X = analysis._stacked_simplices(rng, 3, 4, 0.0, math.sqrt(2))
    from adagae.graph import build_distribution, pairwise_sq_distances
    P = build_distribution(pairwise_sq_distances(X), 4).toarray()
    for row in P:
        vals = np.sort(row[row > 0])[::-1]
        np.testing.assert_allclose(vals, [2 / 5, 1 / 5, 1 / 5, 1 / 5], atol=1e-12)


def test_premise_gate_excludes_weak_rows():
    import scipy.sparse as sp
    P = sp.csr_matrix(np.array([[0.5, 0.5, 0.0], [0.98, 0.01, 0.01], [0.0, 0.5, 0.5]]))
    close, strong = analysis._premise_rows(P, P.toarray(), 1e-2, 2)
    assert close.all()
    assert strong.tolist() == [True, False, True]


def test_probe_small():
    rep = analysis.probe_degeneration(n=20, k=4, epsilon=1e-3, seed=1)
    assert rep.violations == 0
    assert not rep.details["inconclusive"]
    assert rep.details["reconstruction_error"] <= 1e-3
    assert rep.details["max_spread"] <= rep.details["bound"]


@pytest.mark.parametrize("kw", [dict(epsilon=0.3), dict(epsilon=0.0), dict(k=1)])
def test_probe_rejects_bad_parameters(kw):
    with pytest.raises(ConfigError):
        analysis.probe_degeneration(**kw)


# entropy / spectrum

def test_entropy_equivalence_small():
    rep = analysis.verify_entropy_equivalence(trials=10, n=8, seed=2)
    assert rep.violations == 0


@given(arrays(np.float64, st.integers(2, 8), elements=st.floats(0, 5)))
def test_softmax_minimizes_free_energy(d):
    q = np.exp(-d) / np.exp(-d).sum()
    f_soft = analysis.entropic_objective(q, d)
    rng = np.random.default_rng(0)
    for _ in range(5):
        r = rng.dirichlet(np.ones(len(d)))
        assert f_soft <= analysis.entropic_objective(r, d) + 1e-12


def test_spectrum_small():
    rep = analysis.verify_spectrum(trials=10, n=10, seed=5)
    assert rep.violations == 0


def test_path_graph_with_self_loops():
    n = 6
    A = np.eye(n) * 0.5
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = 1.0
    ev, ev_off = analysis.spectrum_pair(A)
    assert abs(ev[0]) < 1e-10 and abs(ev_off[0]) < 1e-10
    assert ev[-1] < ev_off[-1]


def test_random_graph_connected(rng):
    import scipy.sparse.csgraph as cg
    A = analysis.random_connected_graph(rng, 15)
    assert np.all(np.diag(A) > 0)
    assert cg.connected_components(A - np.diag(np.diag(A)))[0] == 1


# collapse trace

class _Rec:
    def __init__(self, epoch, k, disp):
        self.epoch, self.k, self.dispersion = epoch, k, disp


class _Run:
    def __init__(self, ks, disp, labels):
        self.epochs = [_Rec(i, k, d) for i, (k, d) in enumerate(zip(ks, disp))]
        self.labels = np.asarray(labels)


def test_collapse_trace_report():
    a = _Run([2, 3], [0.5, 0.4], [0, 0, 1, 1])
    f = _Run([2, 2], [0.5, 0.3], [0, 1, 0, 1])
    rep = analysis.collapse_trace(a, f, truth=[0, 0, 1, 1])
    assert rep["adaptive"]["acc"] == 1.0 and rep["fixed"]["acc"] == 0.5
    assert rep["epochs"][1]["dispersion_fixed"] == 0.3


def test_collapse_trace_shape_mismatch():
    with pytest.raises(ConfigError):
        analysis.collapse_trace(_Run([2], [0.1], [0, 1]), _Run([2, 2], [0.1, 0.1], [0, 1]))
    with pytest.raises(ConfigError):
        analysis.collapse_trace(_Run([2], [0.1], [0, 1]), _Run([2], [0.1], [0, 1, 1]))
