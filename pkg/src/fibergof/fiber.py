"""Exhaustive enumeration of small observable fibers.

This is the ground truth that sampler output is checked against: every state a
chain visits must be an element, and long chains must reach all of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import Infeasible, OracleViolation, TooLarge
from .netgraph import DirectedGraph, DyadState, SufficientStats, dyads, suff_stats

DEFAULT_MAX_DYADS = 45
DEFAULT_MAX_NODES = 10


@dataclass(frozen=True)
class Fiber:
    elements: tuple  # DirectedGraphs sorted by canonical edge list
    stats: SufficientStats

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g):
        key = g.canonical if isinstance(g, DirectedGraph) else tuple(g)
        return key in self.index

    @cached_property
    def index(self) -> dict:
        """canonical edge tuple -> position in :attr:`elements`."""
        return {g.canonical: k for k, g in enumerate(self.elements)}


# per-state contributions (out_i, in_i, out_j, in_j, mutual)
_STATE_EFFECT = {
    DyadState.NULL: (0, 0, 0, 0, 0),
    DyadState.OUT: (1, 0, 0, 1, 0),
    DyadState.IN: (0, 1, 1, 0, 0),
    DyadState.MUTUAL: (1, 1, 1, 1, 1),
}


def _feasible(need_out, need_in, need_rec, remaining) -> bool:
    if need_rec < 0 or need_out < need_rec or need_in < need_rec:
        return False
    # each remaining dyad supplies at most one of: single out, single in, mutual
    return (need_out - need_rec) + (need_in - need_rec) + need_rec <= remaining


def _search(n, stats):
    pairs = dyads(n)
    out = [0] + list(stats.out_deg)
    inn = [0] + list(stats.in_deg)
    rec = [0] + list(stats.recip_deg)
    remaining = [0] + [n - 1] * n
    for v in range(1, n + 1):
        if not _feasible(out[v], inn[v], rec[v], remaining[v]):
            return
    chosen: list = []

    def rec_search(k):
        if k == len(pairs):
            yield list(chosen)
            return
        i, j = pairs[k]
        remaining[i] -= 1
        remaining[j] -= 1
        for state, (oi, ii, oj, ij, mu) in _STATE_EFFECT.items():
            out[i] -= oi; inn[i] -= ii; out[j] -= oj; inn[j] -= ij
            rec[i] -= mu; rec[j] -= mu
            if _feasible(out[i], inn[i], rec[i], remaining[i]) and _feasible(out[j], inn[j], rec[j], remaining[j]):
                chosen.append(state)
                yield from rec_search(k + 1)
                chosen.pop()
            out[i] += oi; inn[i] += ii; out[j] += oj; inn[j] += ij
            rec[i] += mu; rec[j] += mu
        remaining[i] += 1
        remaining[j] += 1

    for states in rec_search(0):
        edges = set()
        for (i, j), s in zip(pairs, states):
            if s in (DyadState.OUT, DyadState.MUTUAL):
                edges.add((i, j))
            if s in (DyadState.IN, DyadState.MUTUAL):
                edges.add((j, i))
        yield DirectedGraph(n, frozenset(edges))


def _make_fiber(graphs, stats) -> Fiber:
    return Fiber(tuple(sorted(graphs, key=lambda g: g.canonical)), stats)


def enumerate_p1_fiber(g: DirectedGraph, max_dyads: int = DEFAULT_MAX_DYADS) -> Fiber:
    """All simple digraphs on ``g.n`` nodes with the out-, in- and reciprocated degrees of ``g``."""
    n_dyads = g.n * (g.n - 1) // 2
    if n_dyads > max_dyads:
        raise TooLarge(f"{n_dyads} dyads exceeds the enumeration guard of {max_dyads}")
    stats = suff_stats(g)
    return _make_fiber(_search(g.n, stats), stats)


def is_graphical(degrees) -> bool:
    """Erdos-Gallai test for an undirected degree sequence."""
    d = sorted((int(x) for x in degrees), reverse=True)
    if any(x < 0 for x in d) or sum(d) % 2:
        return False
    n = len(d)
    for k in range(1, n + 1):
        lhs = sum(d[:k])
        rhs = k * (k - 1) + sum(min(x, k) for x in d[k:])
        if lhs > rhs:
            return False
    return True


def enumerate_undirected_fiber(degree_seq, max_nodes: int = DEFAULT_MAX_NODES) -> Fiber:
    """All simple undirected graphs with the given degrees, as all-mutual digraphs."""
    degree_seq = [int(x) for x in degree_seq]
    n = len(degree_seq)
    if n > max_nodes:
        raise TooLarge(f"{n} nodes exceeds the enumeration guard of {max_nodes}")
    if not is_graphical(degree_seq):
        raise Infeasible(f"degree sequence {degree_seq} is not graphical")
    pairs = dyads(n)
    need = [0] + degree_seq
    remaining = [0] + [n - 1] * n
    chosen: list = []
    found = []

    def rec_search(k):
        if k == len(pairs):
            found.append(list(chosen))
            return
        i, j = pairs[k]
        remaining[i] -= 1
        remaining[j] -= 1
        for take in (0, 1):
            need[i] -= take
            need[j] -= take
            if 0 <= need[i] <= remaining[i] and 0 <= need[j] <= remaining[j]:
                if take:
                    chosen.append((i, j))
                rec_search(k + 1)
                if take:
                    chosen.pop()
            need[i] += take
            need[j] += take
        remaining[i] += 1
        remaining[j] += 1

    rec_search(0)
    graphs = []
    for pair_list in found:
        edges = set()
        for i, j in pair_list:
            edges.add((i, j))
            edges.add((j, i))
        graphs.append(DirectedGraph(n, frozenset(edges)))
    d = tuple(degree_seq)
    return _make_fiber(graphs, SufficientStats(d, d, d))


def fiber_coverage(visit_histogram, f: Fiber) -> tuple[int, int]:
    """``(visited, missing)`` counts of a chain's visit histogram against ``f``.

    ``visit_histogram`` is a mapping keyed by canonical edge tuples, or an
    object with a ``visit_histogram`` attribute (a chain result).
    """
    hist = getattr(visit_histogram, "visit_histogram", visit_histogram)
    if hist is None:
        raise ValueError("chain was run without visit tracking")
    visited = set(hist)
    strays = [key for key in visited if key not in f.index]
    if strays:
        raise OracleViolation(f"{len(strays)} visited states are outside the fiber, e.g. {strays[0]}")
    return len(visited), len(f) - len(visited)


def enumerate_table_fiber(row_sums, col_sums, max_tables: int = 1_000_000) -> list:
    """All nonnegative integer tables with the given margins, in lexicographic order."""
    rows = [int(r) for r in row_sums]
    cols = [int(c) for c in col_sums]
    if sum(rows) != sum(cols) or min(rows + cols, default=0) < 0:
        raise Infeasible(f"margins {rows} and {cols} admit no table")
    a, b = len(rows), len(cols)
    cell = [[0] * b for _ in range(a)]
    left = list(cols)
    out = []

    def fill(i, j, row_left):
        if i == a:
            if len(out) >= max_tables:
                raise TooLarge(f"more than {max_tables} tables")
            out.append(np.array(cell, dtype=np.int64))
            return
        if j == b - 1:
            if row_left <= left[j]:
                cell[i][j] = row_left
                left[j] -= row_left
                fill(i + 1, 0, rows[i + 1] if i + 1 < a else 0)
                left[j] += row_left
            return
        for v in range(min(row_left, left[j]) + 1):
            cell[i][j] = v
            left[j] -= v
            fill(i, j + 1, row_left - v)
            left[j] += v

    fill(0, 0, rows[0] if a else 0)
    return out
