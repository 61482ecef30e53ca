import math
import random

import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import interior_graph, random_digraph
from fibergof.errors import DegenerateFit, InvalidSize
from fibergof.fiber import enumerate_p1_fiber
from fibergof.netgraph import DirectedGraph, dyads, suff_stats
from fibergof.p1model import (
    P1Fit,
    P1Params,
    chi_square,
    contribution_table,
    dyad_index,
    dyad_probs,
    fit_mle,
    log_likelihood,
)


def test_dyad_index_matches_order():
    for n in (2, 3, 6):
        for k, (i, j) in enumerate(dyads(n)):
            assert dyad_index(n, i, j) == k


def test_dyad_probs_uniform():
    p = P1Params.uniform(3)
    assert dyad_probs(p, 1, 2) == pytest.approx((0.25,) * 4)


def test_dyad_probs_alpha_two():
    p = P1Params(np.array([2.0, 1.0]), np.ones(2), np.ones(2), np.zeros((2, 2))).normalized()
    assert dyad_probs(p, 1, 2) == pytest.approx((1 / 6, 2 / 6, 1 / 6, 2 / 6))


def test_dyad_probs_rho_limit():
    p = P1Params(np.ones(2), np.ones(2), np.array([1e-12, 1.0]), np.zeros((2, 2))).normalized()
    probs = dyad_probs(p, 1, 2)
    assert probs[3] < 1e-11
    assert probs[:3] == pytest.approx((1 / 3,) * 3)


def test_dyad_probs_requires_order():
    with pytest.raises(ValueError):
        dyad_probs(P1Params.uniform(3), 2, 1)


def test_fit_rejects_bad_input():
    with pytest.raises(InvalidSize):
        fit_mle(DirectedGraph(1))
    with pytest.raises(ValueError):
        fit_mle(DirectedGraph(3), tol=0)


def test_fit_single_mutual_dyad_is_degenerate():
    rep = fit_mle(DirectedGraph(2, frozenset({(1, 2), (2, 1)})))
    # the MLE sits on the boundary: p11 -> 1 with a slowly shrinking residual
    assert rep.fit.prob(1, 2)[3] > 0.999
    assert not rep.converged
    assert rep.converged == (rep.max_stat_residual <= rep.tol)


def test_fit_symmetric_graph_gives_identical_dyads():
    full = DirectedGraph(4, frozenset((i, j) for i in range(1, 5) for j in range(1, 5) if i != j))
    rep = fit_mle(full)
    # node-by-node sweeps break the symmetry within an iteration; the limit is symmetric
    assert np.abs(rep.fit.probs - rep.fit.probs[0]).max() <= rep.max_stat_residual
    assert rep.fit.probs[:, 3].min() > 0.999


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_fit_matches_margins(seed):
    g = interior_graph(12, seed)
    rep = fit_mle(g)
    assert rep.converged and rep.max_stat_residual <= 1e-8
    out, inn, rec = rep.fit.expected_stats()
    s = suff_stats(g)
    assert np.abs(out - s.out_deg).max() <= 1e-8
    assert np.abs(inn - s.in_deg).max() <= 1e-8
    assert np.abs(rec - s.recip_deg).max() <= 1e-8
    assert np.abs(rep.fit.probs.sum(axis=1) - 1).max() <= 1e-12
    assert (rep.fit.probs >= 0).all()


def _neg_loglik(theta, g):
    n = g.n
    la, lb, lr = theta[:n], theta[n:2 * n], theta[2 * n:]
    total = 0.0
    for i, j in dyads(n):
        a, b = i - 1, j - 1
        logs = np.array([0.0, la[a] + lb[b], la[b] + lb[a], la[a] + lb[b] + la[b] + lb[a] + lr[a] + lr[b]])
        m = logs.max()
        lz = m + math.log(np.exp(logs - m).sum())
        total += logs[g.dyad_state(i, j)] - lz
    return -total


def test_fit_agrees_with_generic_optimizer():
    g = interior_graph(12, 7)
    rep = fit_mle(g)
    res = minimize(_neg_loglik, np.zeros(36), args=(g,), method="BFGS", options={"gtol": 1e-9})
    assert log_likelihood(g, rep.fit) >= -res.fun - 1e-7
    n = g.n
    params = P1Params(np.exp(res.x[:n]), np.exp(res.x[n:2 * n]), np.exp(res.x[2 * n:]), np.zeros((n, n)))
    other = P1Fit.from_params(params.normalized())
    assert np.abs(other.probs - rep.fit.probs).max() < 1e-4


def test_likelihood_constant_on_fiber():
    # log-linear in the sufficient statistics, so any parameter value will do
    rng = np.random.default_rng(0)
    graph_rng = random.Random(11)
    g = random_digraph(5, 0.4, graph_rng)
    while len(enumerate_p1_fiber(g)) < 3:
        g = random_digraph(5, 0.4, graph_rng)
    n = g.n
    params = P1Params(rng.uniform(0.2, 3, n), rng.uniform(0.2, 3, n), rng.uniform(0.2, 3, n), np.zeros((n, n)))
    fit = P1Fit.from_params(params.normalized())
    lls = [log_likelihood(h, fit) for h in enumerate_p1_fiber(g)]
    assert len(lls) > 1
    assert max(lls) - min(lls) < 1e-9


def test_chi_square_uniform_single_out_dyad():
    fit = P1Fit(2, np.full((1, 4), 0.25))
    assert chi_square(DirectedGraph(2, frozenset({(1, 2)})), fit) == pytest.approx(3.0)


def test_chi_square_perfect_fit_is_zero():
    fit = P1Fit(3, np.array([[0, 0, 0, 1.0], [1.0, 0, 0, 0], [0, 1.0, 0, 0]]))
    g = DirectedGraph(3, frozenset({(1, 2), (2, 1), (2, 3)}))
    assert chi_square(g, fit) == pytest.approx(0.0, abs=1e-9)


def test_chi_square_degenerate_observed_state():
    fit = P1Fit(2, np.array([[1.0, 0.0, 0.0, 0.0]]))
    with pytest.raises(DegenerateFit):
        chi_square(DirectedGraph(2, frozenset({(1, 2)})), fit)


def test_contribution_table_matches_direct_sum():
    g = interior_graph(12, 3)
    fit = fit_mle(g).fit
    table = contribution_table(fit)
    total = sum(table[k][g.dyad_state(i, j)] for k, (i, j) in enumerate(dyads(g.n)))
    assert total == pytest.approx(chi_square(g, fit), rel=1e-12)


def test_chi_square_relabel_invariant():
    g = interior_graph(12, 5)
    order = list(range(1, 13))
    random.Random(0).shuffle(order)
    perm = dict(zip(range(1, 13), order))
    h = DirectedGraph(12, frozenset((perm[i], perm[j]) for i, j in g.edges))
    assert chi_square(g, fit_mle(g).fit) == pytest.approx(chi_square(h, fit_mle(h).fit), rel=1e-7)


def test_report_serializes():
    g = interior_graph(12, 2)
    d = fit_mle(g).to_dict()
    assert d["n"] == 12 and len(d["dyads"]) == 66
    assert all(abs(sum(row["probs"]) - 1) < 1e-12 for row in d["dyads"])
