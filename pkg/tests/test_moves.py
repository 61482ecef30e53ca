import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_digraph
from fibergof import moves
from fibergof.errors import InvalidSize
from fibergof.fiber import enumerate_p1_fiber
from fibergof.hypergraph import (
    EdgeMultiset,
    Vertex,
    contract_p1,
    degree_vector,
    independence_hypergraph,
    is_balanced,
    lift,
    make_edge,
    p1_hypergraph,
    table_to_edges,
)
from fibergof.netgraph import TRIVIAL, DirectedGraph, Move, apply_move, suff_stats
from kernel_oracle import proposal_kernel


def G(n, *edges):
    return DirectedGraph(n, frozenset(edges))


def xy(i, j):
    return make_edge([Vertex("x", (i,)), Vertex("y", (j,))])


def test_composition_counts_match_enumeration():
    for m in range(0, 13):
        comps = list(moves.compositions(m))
        assert len(comps) == moves.composition_count(m)
        assert all(min(c, default=2) >= 2 and sum(c) == m for c in comps)
    assert moves.composition_count(1) == 0
    assert set(moves.compositions(4)) == {(4,), (2, 2)}
    assert set(moves.compositions(5)) == {(5,), (2, 3), (3, 2)}


@pytest.mark.parametrize("m", [2, 4, 5, 7])
def test_random_composition_is_uniform(m):
    from scipy.stats import chisquare

    rng = random.Random(m)
    draws = Counter(moves.random_composition(m, rng) for _ in range(20000))
    comps = list(moves.compositions(m))
    assert set(draws) == set(comps)
    if len(comps) > 1:
        assert chisquare([draws[c] for c in comps]).pvalue > 1e-3


def test_random_composition_rejects_small():
    for m in (0, 1):
        with pytest.raises(InvalidSize):
            moves.random_composition(m, random.Random(0))


def test_close_walks_figure_example():
    seq = [(2, 1), (3, 4), (5, 6)]
    assert moves.close_walks(seq, (3,)) == [(3, 1), (5, 4), (2, 6)]


def test_type2_figure_example():
    g = G(6, (2, 1), (3, 4), (5, 6))
    m = moves.type2_from_draw(g.edges, [(2, 1), (3, 4), (5, 6)], (3,))
    assert m.remove == {(2, 1), (3, 4), (5, 6)}
    assert m.add == {(2, 6), (3, 1), (5, 4)}
    assert suff_stats(apply_move(g, m)) == suff_stats(g)


def test_type1_two_pairs_all_orientations():
    g = G(4, (1, 2), (2, 1), (3, 4), (4, 3))
    seen = set()
    for seq in ([(1, 2), (3, 4)], [(2, 1), (3, 4)], [(1, 2), (4, 3)], [(2, 1), (4, 3)]):
        m = moves.type1_from_draw(g.edges, seq, (2,))
        assert m.remove == g.edges
        seen.add(frozenset(m.add))
        h = apply_move(g, m)
        assert suff_stats(h) == suff_stats(g)
    assert seen == {frozenset({(1, 3), (3, 1), (2, 4), (4, 2)}), frozenset({(1, 4), (4, 1), (2, 3), (3, 2)})}


def test_type1_trivial_cases():
    rng = random.Random(0)
    one = G(3, (1, 2), (2, 1), (3, 1))
    assert all(moves.gen_type1(one, rng) == TRIVIAL for _ in range(50))
    # a new pair on {1, 4} collides with the arc 1 -> 4
    g = G(4, (1, 2), (2, 1), (3, 4), (4, 3), (1, 4))
    assert moves.type1_from_draw(g.edges, [(1, 2), (3, 4)], (2,)) == TRIVIAL


def test_type2_trivial_cases():
    rng = random.Random(0)
    one = G(3, (1, 2), (2, 1), (3, 1))
    assert all(moves.gen_type2(one, rng) == TRIVIAL for _ in range(50))
    # closing 1 -> 2, 3 -> 1 would create the self-loop 1 -> 1
    g = G(3, (1, 2), (3, 1))
    assert moves.type2_from_draw(g.edges, [(1, 2), (3, 1)], (2,)) == TRIVIAL


def test_type3_reduces_to_type2_without_mutual_pairs():
    g = G(6, (2, 1), (3, 4), (5, 6))
    seq = [(2, 1), (3, 4), (5, 6)]
    assert moves.type3_from_draw(g.edges, (), (), seq, (3,)) == moves.type2_from_draw(g.edges, seq, (3,))


def test_type3_shared_skeleton_pair_is_trivial():
    g = G(6, (1, 2), (2, 1), (3, 4), (4, 3), (1, 5), (6, 4))
    # Type 1 half adds {1, 4} and {2, 3}; Type 2 half adds 6 -> 5 and 1 -> 4
    assert moves.close_walks([(1, 5), (6, 4)], (2,)) == [(6, 5), (1, 4)]
    m = moves.type3_from_draw(g.edges, [(1, 2), (3, 4)], (2,), [(1, 5), (6, 4)], (2,))
    assert m == TRIVIAL


def test_type3_joint_move_preserves_stats():
    g = G(8, (1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (7, 8))
    m = moves.type3_from_draw(g.edges, [(1, 2), (3, 4)], (2,), [(5, 6), (7, 8)], (2,))
    assert not m.trivial
    assert suff_stats(apply_move(g, m)) == suff_stats(g)


def test_gen_move_degenerate_weights():
    rng = random.Random(1)
    g = G(5, (1, 2), (3, 4), (5, 1), (2, 3))
    # only unreciprocated arcs: Type 1 always finds nothing to select
    assert all(moves.gen_move(g, (1, 0, 0), rng) == TRIVIAL for _ in range(200))
    assert any(not moves.gen_move(g, (0, 1, 0), rng).trivial for _ in range(200))


def test_weights_validation():
    with pytest.raises(ValueError):
        moves.MoveTypeWeights(0.5, 0.5, 0.5).validate()
    with pytest.raises(ValueError):
        moves.MoveTypeWeights(1.2, -0.1, -0.1).validate()


def test_same_seed_same_moves():
    g = random_digraph(10, 0.3, random.Random(4))
    a = [moves.gen_move(g, rng=r) for r in [random.Random(9)] for _ in range(300)]
    b = [moves.gen_move(g, rng=r) for r in [random.Random(9)] for _ in range(300)]
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 12), st.floats(0.1, 0.5), st.integers(0, 10**6))
def test_moves_preserve_stats_and_invert(n, density, seed):
    rng = random.Random(seed)
    g = random_digraph(n, density, rng)
    s = suff_stats(g)
    for _ in range(100):
        m = moves.gen_move(g, rng=rng)
        if m.trivial:
            continue
        h = apply_move(g, m)
        assert suff_stats(h) == s
        assert apply_move(h, m.inverse()) == g
        g = h


def _hyper_diff(g, h, H):
    eg, eh = table_to_edges(g, H), table_to_edges(h, H)
    return EdgeMultiset(eg - eh), EdgeMultiset(eh - eg)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 9), st.integers(0, 10**6))
def test_moves_have_lift_form(n, seed):
    rng = random.Random(seed)
    g = random_digraph(n, 0.4, rng)
    H = p1_hypergraph(n)
    for _ in range(60):
        m = moves.gen_move(g, rng=rng)
        if m.trivial:
            continue
        h = apply_move(g, m)
        red, blue = _hyper_diff(g, h, H)
        w_red = [contract_p1(e) for e in red.elements() if len(e) > 1]
        w_blue = [contract_p1(e) for e in blue.elements() if len(e) > 1]
        # W is balanced on A_n u K_n
        dr = Counter(v for e in w_red for v in e)
        db = Counter(v for e in w_blue for v in e)
        assert +dr == +db
        big_b, big_r = lift(w_blue, w_red)
        assert big_b == blue and big_r == red
        assert is_balanced(red, blue)
        lam_deg = degree_vector(red)
        assert all(d <= 1 for v, d in lam_deg.items() if v.kind == "lambda")
        g = h


def test_reachability_witness():
    g1 = G(4, (1, 2), (2, 3), (3, 4), (4, 1))
    fiber = enumerate_p1_fiber(g1)
    assert len(fiber) > 1
    g2 = next(h for h in fiber if h != g1)
    rng = random.Random(3)
    hits = sum(apply_move(g1, moves.gen_move(g1, rng=rng)) == g2 for _ in range(5000))
    assert hits > 0


SYMMETRY_CASES = [
    G(4, (1, 2), (2, 3), (3, 4), (4, 1)),
    G(5, (1, 2), (2, 1), (3, 4), (4, 3), (1, 5), (5, 3)),
    G(5, (1, 2), (2, 1), (2, 3), (3, 4), (4, 5), (5, 1)),
    G(6, (1, 2), (2, 1), (3, 4), (4, 3), (5, 6), (6, 5)),
    # connected only because a dyad emptied by one half of a Type 3 move may be refilled by the other
    G(4, (1, 2), (1, 3), (2, 1), (2, 3), (2, 4), (3, 1), (3, 4), (4, 1), (4, 2)),
]


@pytest.mark.parametrize("g", SYMMETRY_CASES)
def test_exact_kernel_symmetric_and_in_fiber(g):
    fiber = enumerate_p1_fiber(g)
    kernels = {h.canonical: proposal_kernel(h) for h in fiber}
    for x, row in kernels.items():
        assert sum(row.values()) == 1
        for y, p in row.items():
            assert y in fiber.index
            assert kernels[y].get(x, 0) == p
    # irreducible: every state reachable from the first
    seen = {fiber.elements[0].canonical}
    stack = list(seen)
    while stack:
        for y in kernels[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    assert len(seen) == len(fiber)


def test_bipartite_example_move():
    H = independence_hypergraph(5, 5)
    red, blue = moves.bipartite_from_draw([xy(1, 1), xy(2, 5), xy(3, 4)], (3,), H)
    assert blue == EdgeMultiset([xy(2, 1), xy(3, 5), xy(1, 4)])
    assert is_balanced(red, blue)


def test_bipartite_two_by_two_swap():
    H = independence_hypergraph(2, 2)
    red, blue = moves.bipartite_from_draw([xy(1, 1), xy(2, 2)], (2,), H)
    assert blue == EdgeMultiset([xy(1, 2), xy(2, 1)])


def test_bipartite_repeated_vertex_is_balanced():
    H = independence_hypergraph(2, 2)
    red, blue = moves.bipartite_from_draw([xy(1, 1), xy(1, 2)], (2,), H)
    assert red == blue and is_balanced(red, blue)


def test_gen_bipartite_move_is_applicable_and_balanced():
    table = np.array([[3, 2, 0, 1, 0], [1, 0, 0, 0, 1], [0, 0, 0, 2, 0], [0, 1, 0, 0, 0], [0, 0, 0, 0, 0]])
    H = independence_hypergraph(5, 5)
    e_u = table_to_edges(table, H)
    rng = random.Random(0)
    for _ in range(500):
        red, blue = moves.gen_bipartite_move(e_u, H, rng)
        assert moves.is_applicable(e_u, red)
        assert is_balanced(red, blue)


def test_basic_moves_single_applicable():
    H = independence_hypergraph(5, 5)
    table = np.zeros((5, 5), dtype=int)
    table[0, 0] = table[1, 1] = 1
    e_u = table_to_edges(table, H)
    basic = moves.basic_moves(H)
    assert len(basic) == 200
    usable = [(r, b) for r, b in basic if moves.is_applicable(e_u, r)]
    assert usable == [(EdgeMultiset([xy(1, 1), xy(2, 2)]), EdgeMultiset([xy(1, 2), xy(2, 1)]))]
