import random

import numpy as np
import pytest

from fibergof.netgraph import DirectedGraph


def random_digraph(n, density, rng):
    edges = {(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j and rng.random() < density}
    return DirectedGraph(n, frozenset(edges))


def random_dyadic(n, rng, probs=(0.25, 0.25, 0.25, 0.25)):
    """Each dyad independently Null/Out/In/Mutual with the given probabilities."""
    from fibergof.netgraph import dyads

    edges = set()
    for i, j in dyads(n):
        s = rng.choices(range(4), probs)[0]
        if s in (1, 3):
            edges.add((i, j))
        if s in (2, 3):
            edges.add((j, i))
    return DirectedGraph(n, frozenset(edges))


def interior_graph(n, seed, margin=1e-3):
    """First random dyadic graph whose MLE is certified interior by the LP."""
    rng = random.Random(seed)
    while True:
        g = random_dyadic(n, rng)
        if lp_interior_margin(g) > margin:
            return g


def lp_interior_margin(g):
    """Largest t such that some dyad-probability table with the observed expected
    statistics has every probability >= t. A positive value certifies that the
    MLE exists in the interior."""
    from scipy.optimize import linprog

    from fibergof.netgraph import dyads, suff_stats

    n = g.n
    ds = dyads(n)
    nv = 4 * len(ds) + 1
    c = np.zeros(nv)
    c[-1] = -1.0
    a_eq, b_eq = [], []
    for k in range(len(ds)):
        row = np.zeros(nv)
        row[4 * k:4 * k + 4] = 1
        a_eq.append(row)
        b_eq.append(1.0)
    out, inn, rec = suff_stats(g)
    for v in range(1, n + 1):
        ro, ri, rr = np.zeros(nv), np.zeros(nv), np.zeros(nv)
        for k, (i, j) in enumerate(ds):
            if v == i:
                ro[4 * k + 1] = ro[4 * k + 3] = 1
                ri[4 * k + 2] = ri[4 * k + 3] = 1
            elif v == j:
                ro[4 * k + 2] = ro[4 * k + 3] = 1
                ri[4 * k + 1] = ri[4 * k + 3] = 1
            else:
                continue
            rr[4 * k + 3] = 1
        for row, val in ((ro, out[v - 1]), (ri, inn[v - 1]), (rr, rec[v - 1])):
            a_eq.append(row)
            b_eq.append(val)
    a_ub = np.zeros((nv - 1, nv))
    for k in range(nv - 1):
        a_ub[k, k] = -1
        a_ub[k, -1] = 1
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(nv - 1), A_eq=np.array(a_eq), b_eq=b_eq,
                  bounds=[(0, 1)] * (nv - 1) + [(0, 1)], method="highs")
    return -res.fun if res.success else 0.0


@pytest.fixture
def rng():
    return random.Random(12345)
