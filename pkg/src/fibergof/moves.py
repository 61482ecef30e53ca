"""Dynamically generated applicable moves.

p1 moves come in three types: Type 1 rewires reciprocated pairs along closed
even walks on the complete graph of rho-vertices, Type 2 rewires unreciprocated
arcs along closed even walks on the alpha-beta bipartite graph, and Type 3 does
both at once. Each generator draws a random ordered subset of edges, cuts it
into cycles with a random composition (all parts >= 2) and closes every cycle
by joining the tail of each edge to the head of the previous one. Draws that
would leave the observable fiber yield the trivial move; they are never
resampled.

The same walk-closing rule drives :func:`gen_bipartite_move` for two-way tables
under independence.
"""
from __future__ import annotations

import random
from functools import lru_cache
from typing import NamedTuple, Protocol, Sequence

from .errors import InvalidSize
from .hypergraph import EdgeMultiset, ParamHypergraph
from .netgraph import TRIVIAL, Arc, Move, Pair

DEFAULT_MAX_SUBSET = 10


class MoveTypeWeights(NamedTuple):
    c1: float = 0.34
    c2: float = 0.33
    c3: float = 0.33

    def validate(self) -> "MoveTypeWeights":
        if min(self) < 0 or abs(sum(self) - 1.0) > 1e-9:
            raise ValueError(f"move-type weights must be nonnegative and sum to 1, got {tuple(self)}")
        return self


class GraphView(Protocol):
    """What the generators read from a state: edge set plus indexable edge pools."""

    edges: frozenset | set
    mutual_pairs: Sequence[Pair]
    unreciprocated: Sequence[Arc]


def make_rng(seed=None) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


@lru_cache(maxsize=None)
def composition_count(m: int) -> int:
    """Number of compositions of ``m`` with every part >= 2 (1 for m = 0)."""
    if m == 0:
        return 1
    return sum(composition_count(m - p) for p in range(2, m + 1))


def _below(n: int, rng: random.Random) -> int:
    # floor(random() * n), as random.choices does; much cheaper than randrange
    return int(rng.random() * n)


def _sample(pool: Sequence, k: int, rng: random.Random) -> list:
    """Ordered uniform sample of ``k`` distinct items (k small next to len(pool) or not)."""
    n = len(pool)
    rand = rng.random
    picked = set()
    out = []
    while len(out) < k:
        j = int(rand() * n)
        if j not in picked:
            picked.add(j)
            out.append(pool[j])
    return out


def random_composition(m: int, rng: random.Random) -> tuple[int, ...]:
    """Uniform draw among compositions of ``m`` with all parts >= 2."""
    if m < 2:
        raise InvalidSize(f"no composition of {m} has all parts >= 2")
    parts = []
    rest = m
    while rest:
        # first part p is chosen with probability C(rest - p) / C(rest)
        u = _below(composition_count(rest), rng)
        for p in range(2, rest + 1):
            u -= composition_count(rest - p)
            if u < 0:
                break
        parts.append(p)
        rest -= p
    return tuple(parts)


def compositions(m: int):
    """All compositions of ``m`` with parts >= 2 (enumeration for tests and oracles)."""
    if m == 0:
        yield ()
        return
    for p in range(2, m + 1):
        for rest in compositions(m - p):
            yield (p,) + rest


def close_walks(seq: Sequence[tuple], comp: Sequence[int]) -> list[tuple]:
    """Join consecutive edges of each part into a closed even walk.

    For a part ``(t_1, h_1), ..., (t_m, h_m)`` the new edges are
    ``(t_{i+1}, h_i)`` with indices taken cyclically.
    """
    out = []
    start = 0
    for size in comp:
        part = seq[start:start + size]
        for i in range(size):
            out.append((part[(i + 1) % size][0], part[i][1]))
        start += size
    return out


def _subset_size(available: int, cap: int, rng: random.Random) -> int:
    if available < 2 or cap < 2:
        return 0
    return 2 + _below(min(cap, available) - 1, rng)


def _draw_type1(g: GraphView, rng, cap):
    k = _subset_size(len(g.mutual_pairs), cap, rng)
    if not k:
        return None
    chosen = _sample(g.mutual_pairs, k, rng)
    seq = [(a, b) if rng.random() < 0.5 else (b, a) for a, b in chosen]
    return seq, random_composition(k, rng)


def _draw_type2(g: GraphView, rng, cap):
    k = _subset_size(len(g.unreciprocated), cap, rng)
    if not k:
        return None
    return _sample(g.unreciprocated, k, rng), random_composition(k, rng)


def _type1_pairs(arcs, seq, comp):
    removed = {(min(e), max(e)) for e in seq}
    new = set()
    for x, y in close_walks(seq, comp):
        if x == y:
            return None
        p = (x, y) if x < y else (y, x)
        if p in new:
            return None
        new.add(p)
    return removed, new


def _dyad_free(arcs, pair, removed_pairs) -> bool:
    x, y = pair
    return pair in removed_pairs or ((x, y) not in arcs and (y, x) not in arcs)


def _pairs_move(removed, new) -> tuple[set, set]:
    rem = set()
    add = set()
    for x, y in removed - new:
        rem.add((x, y))
        rem.add((y, x))
    for x, y in new - removed:
        add.add((x, y))
        add.add((y, x))
    return rem, add


def type1_from_draw(arcs, seq, comp) -> Move:
    """Type 1 move for an oriented sequence of reciprocated pairs; trivial if inapplicable."""
    res = _type1_pairs(arcs, seq, comp)
    if res is None:
        return TRIVIAL
    removed, new = res
    # a new reciprocated pair may only land on a dyad left empty by the removal
    for p in new:
        if not _dyad_free(arcs, p, removed):
            return TRIVIAL
    rem, add = _pairs_move(removed, new)
    return Move(rem, add) if rem else TRIVIAL


def _type2_arcs(seq, comp):
    new = set()
    for x, y in close_walks(seq, comp):
        if x == y or (x, y) in new or (y, x) in new:
            return None
        new.add((x, y))
    return new


def type2_from_draw(arcs, seq, comp) -> Move:
    """Type 2 move for an ordered sequence of unreciprocated arcs; trivial if inapplicable."""
    new = _type2_arcs(seq, comp)
    if new is None:
        return TRIVIAL
    removed = set(seq)
    for x, y in new:
        # the dyad must hold nothing after removal except possibly the reversed arc being removed
        if ((x, y) in arcs and (x, y) not in removed) or ((y, x) in arcs and (y, x) not in removed):
            return TRIVIAL
    rem = removed - new
    return Move(rem, new - removed) if rem else TRIVIAL


def type3_from_draw(arcs, seq_u, comp_u, seq_d, comp_d) -> Move:
    """Joint Type 3 move; either half may be empty.

    A dyad emptied by one half may be refilled by the other (a removed
    reciprocated pair may receive a new arc and vice versa); every other
    collision yields the trivial move.
    """
    if seq_u:
        res = _type1_pairs(arcs, seq_u, comp_u)
        if res is None:
            return TRIVIAL
        removed_u, new_u = res
    else:
        removed_u, new_u = set(), set()
    if seq_d:
        new_d = _type2_arcs(seq_d, comp_d)
        if new_d is None:
            return TRIVIAL
    else:
        new_d = set()
    removed_d = set(seq_d)
    if new_u & {(min(e), max(e)) for e in new_d}:
        return TRIVIAL
    removed_d_pairs = {(min(e), max(e)) for e in removed_d}
    for p in new_u:
        x, y = p
        if (x, y) in arcs or (y, x) in arcs:
            mutual = (x, y) in arcs and (y, x) in arcs
            if not (p in removed_u if mutual else p in removed_d_pairs):
                return TRIVIAL
    for x, y in new_d:
        for e in ((x, y), (y, x)):
            if e not in arcs:
                continue
            if (e[1], e[0]) in arcs:
                if (min(e), max(e)) not in removed_u:
                    return TRIVIAL
            elif e not in removed_d:
                return TRIVIAL
    rem_u, add_u = _pairs_move(removed_u, new_u)
    rem = rem_u | removed_d
    add = add_u | new_d
    common = rem & add
    rem -= common
    add -= common
    return Move(rem, add) if rem else TRIVIAL


def gen_type1(g: GraphView, rng=None, max_subset: int = DEFAULT_MAX_SUBSET) -> Move:
    rng = make_rng(rng)
    draw = _draw_type1(g, rng, max_subset)
    return TRIVIAL if draw is None else type1_from_draw(g.edges, *draw)


def gen_type2(g: GraphView, rng=None, max_subset: int = DEFAULT_MAX_SUBSET) -> Move:
    rng = make_rng(rng)
    draw = _draw_type2(g, rng, max_subset)
    return TRIVIAL if draw is None else type2_from_draw(g.edges, *draw)


def gen_type3(g: GraphView, rng=None, max_subset: int = DEFAULT_MAX_SUBSET) -> Move:
    rng = make_rng(rng)
    du = _draw_type1(g, rng, max_subset) or ((), ())
    dd = _draw_type2(g, rng, max_subset) or ((), ())
    if not du[0] and not dd[0]:
        return TRIVIAL
    return type3_from_draw(g.edges, du[0], du[1], dd[0], dd[1])


def gen_move(g: GraphView, weights=MoveTypeWeights(), rng=None, max_subset: int = DEFAULT_MAX_SUBSET) -> Move:
    """One proposal: a weighted coin picks the move type, then that generator runs once."""
    rng = make_rng(rng)
    c1, c2, _ = weights
    u = rng.random()
    if u < c1:
        return gen_type1(g, rng, max_subset)
    if u < c1 + c2:
        return gen_type2(g, rng, max_subset)
    return gen_type3(g, rng, max_subset)


def gen_bipartite_move(e_u: EdgeMultiset, H: ParamHypergraph, rng=None,
                       max_subset: int = DEFAULT_MAX_SUBSET) -> tuple[EdgeMultiset, EdgeMultiset]:
    """Red/blue edge multisets ``(R, B)`` of a move for a two-way table.

    ``R`` is an ordered random sample of edge copies from ``e(u)``; ``B`` closes
    it into closed even walks, pairing each x-vertex with the y-vertex of the
    previous edge. ``(R, B)`` is always balanced; ``B`` may share edges with
    ``R``. Returns two empty multisets when the draw is degenerate.
    """
    rng = make_rng(rng)
    items = e_u.elements_sorted()
    k = _subset_size(len(items), max_subset, rng)
    if not k:
        return EdgeMultiset(), EdgeMultiset()
    seq = _sample(items, k, rng)
    comp = random_composition(k, rng)
    return bipartite_from_draw(seq, comp, H)


def bipartite_from_draw(seq, comp, H: ParamHypergraph) -> tuple[EdgeMultiset, EdgeMultiset]:
    blue = close_walks(seq, comp)
    if any(e not in H for e in blue):  # structural zero
        return EdgeMultiset(), EdgeMultiset()
    return EdgeMultiset(seq), EdgeMultiset(blue)


def basic_moves(H: ParamHypergraph) -> list[tuple[EdgeMultiset, EdgeMultiset]]:
    """The basic 2x2 moves ``x_i y_j + x_k y_l -> x_i y_l + x_k y_j`` of a two-way table, both signs."""
    a, b = H.shape
    out = []
    for i in range(1, a + 1):
        for k in range(i + 1, a + 1):
            for j in range(1, b + 1):
                for l in range(j + 1, b + 1):
                    r = EdgeMultiset([H.edge((i, j)), H.edge((k, l))])
                    bl = EdgeMultiset([H.edge((i, l)), H.edge((k, j))])
                    out.append((r, bl))
                    out.append((bl, r))
    return out


def is_applicable(e_u, red) -> bool:
    """A move ``(R, B)`` applies to ``e(u)`` iff ``R`` is a sub-multiset of it."""
    return all(e_u.get(e, 0) >= mu for e, mu in red.items())
