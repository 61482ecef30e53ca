"""Parameter hypergraphs of squarefree log-linear models.

Each model parameter is a vertex; each table cell is the hyperedge of the
parameters in its joint-probability monomial. A table (or network) becomes a
multiset of hyperedges whose degree vector is the sufficient statistic, and a
move is a pair of edge multisets with equal degree vectors.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import InvalidSize, ShapeMismatch
from .netgraph import DirectedGraph, DyadState, dyads


class Vertex(NamedTuple):
    kind: str
    index: tuple[int, ...]

    def __str__(self):
        if len(self.index) == 1:
            return f"{self.kind}{self.index[0]}"
        return f"{self.kind}{','.join(map(str, self.index))}"


def alpha(i):
    return Vertex("alpha", (i,))


def beta(i):
    return Vertex("beta", (i,))


def rho(i):
    return Vertex("rho", (i,))


def lam(i, j):
    return Vertex("lambda", (min(i, j), max(i, j)))


Edge = tuple[Vertex, ...]


def make_edge(vertices: Iterable[Vertex]) -> Edge:
    """Canonical (sorted) form of a hyperedge."""
    vs = tuple(sorted(set(vertices)))
    if not vs:
        raise ValueError("hyperedge must be nonempty")
    return vs


def edge_str(e: Edge) -> str:
    return "".join(str(v) for v in e)


@dataclass(frozen=True)
class ParamHypergraph:
    """Vertices plus a cell -> hyperedge map (a bijection onto the edge set)."""

    model: str
    vertices: frozenset
    cells: Mapping = field(repr=False)
    shape: tuple[int, ...] = ()

    def __post_init__(self):
        edges = list(self.cells.values())
        if len(set(edges)) != len(edges):
            raise ValueError("cell -> edge map is not injective")
        for e in edges:
            if not e or not set(e) <= self.vertices:
                raise ValueError(f"edge {edge_str(e)} is not a nonempty vertex subset")
        object.__setattr__(self, "_cell_of", {e: c for c, e in self.cells.items()})

    @property
    def edges(self) -> list[Edge]:
        return list(self.cells.values())

    def edge(self, cell) -> Edge:
        return self.cells[cell]

    def cell(self, edge: Edge):
        return self._cell_of[edge]

    def __contains__(self, edge):
        return edge in self._cell_of


def p1_hypergraph(n: int) -> ParamHypergraph:
    """Parameter hypergraph of the p1 model with edge-dependent reciprocation.

    Cells are tagged ``("null", i, j)`` and ``("mutual", i, j)`` for ``i < j``
    and ``("arc", i, j)`` for every ordered ``i != j``.
    """
    if n < 2:
        raise InvalidSize(f"p1 hypergraph needs n >= 2, got {n}")
    nodes = range(1, n + 1)
    vertices = {f(i) for i in nodes for f in (alpha, beta, rho)}
    vertices |= {lam(i, j) for i, j in dyads(n)}
    cells = {}
    for i, j in dyads(n):
        cells[("null", i, j)] = make_edge([lam(i, j)])
    for i, j in itertools.permutations(nodes, 2):
        cells[("arc", i, j)] = make_edge([alpha(i), beta(j), lam(i, j)])
    for i, j in dyads(n):
        cells[("mutual", i, j)] = make_edge(
            [alpha(i), alpha(j), beta(i), beta(j), rho(i), rho(j), lam(i, j)]
        )
    return ParamHypergraph("p1", frozenset(vertices), cells, (n,))


def independence_hypergraph(a: int, b: int) -> ParamHypergraph:
    """Complete bipartite graph ``x_1..x_a`` vs ``y_1..y_b``; cell ``(i, j)`` is ``x_i y_j``."""
    if a < 1 or b < 1:
        raise InvalidSize(f"table dimensions must be positive, got {a}x{b}")
    xs = [Vertex("x", (i,)) for i in range(1, a + 1)]
    ys = [Vertex("y", (j,)) for j in range(1, b + 1)]
    cells = {
        (i, j): make_edge([xs[i - 1], ys[j - 1]])
        for i in range(1, a + 1)
        for j in range(1, b + 1)
    }
    return ParamHypergraph("independence", frozenset(xs + ys), cells, (a, b))


def quasi_independence_hypergraph(dims, structural_zeros=()) -> ParamHypergraph:
    """Complete 3-partite hypergraph minus the structural-zero cells (1-based)."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise InvalidSize(f"need three positive dimensions, got {dims}")
    zeros = {tuple(c) for c in structural_zeros}
    parts = [[Vertex(k, (i,)) for i in range(1, d + 1)] for k, d in zip("xyz", dims)]
    cells = {}
    for cell in itertools.product(*(range(1, d + 1) for d in dims)):
        if cell not in zeros:
            cells[cell] = make_edge(parts[axis][c - 1] for axis, c in enumerate(cell))
    vertices = frozenset(itertools.chain.from_iterable(parts))
    return ParamHypergraph("quasi-independence", vertices, cells, dims)


class EdgeMultiset(Counter):
    """Hyperedge -> multiplicity. Entries with multiplicity 0 are dropped."""

    def elements_sorted(self) -> list[Edge]:
        return sorted(self.elements())

    def __str__(self):
        return "{" + ", ".join(edge_str(e) for e in self.elements_sorted()) + "}"


def p1_cell(i: int, j: int, state: DyadState):
    """Cell tag for dyad ``i < j`` in the given state."""
    if state == DyadState.NULL:
        return ("null", i, j)
    if state == DyadState.OUT:
        return ("arc", i, j)
    if state == DyadState.IN:
        return ("arc", j, i)
    return ("mutual", i, j)


def table_to_edges(u, H: ParamHypergraph) -> EdgeMultiset:
    """The multiset e(u) of hyperedges representing a table or a p1 network."""
    if isinstance(u, DirectedGraph):
        if H.model != "p1" or H.shape != (u.n,):
            raise ShapeMismatch(f"graph on {u.n} nodes needs the p1 hypergraph on {u.n} nodes")
        ms = EdgeMultiset()
        for (i, j), s in u.dyad_states().items():
            ms[H.edge(p1_cell(i, j, s))] += 1
        return ms
    t = np.asarray(u)
    if t.shape != H.shape:
        raise ShapeMismatch(f"table shape {t.shape} does not match hypergraph shape {H.shape}")
    if (t < 0).any() or not np.issubdtype(t.dtype, np.integer):
        raise ValueError("table entries must be nonnegative integers")
    ms = EdgeMultiset()
    for idx in zip(*np.nonzero(t)):
        cell = tuple(int(k) + 1 for k in idx)
        if cell not in H.cells:
            raise ShapeMismatch(f"cell {cell} is a structural zero but has count {t[idx]}")
        ms[H.edge(cell)] = int(t[idx])
    return ms


def edges_to_table(ms: Mapping[Edge, int], H: ParamHypergraph) -> np.ndarray:
    """Inverse of :func:`table_to_edges` for table models."""
    t = np.zeros(H.shape, dtype=np.int64)
    for e, mu in ms.items():
        t[tuple(c - 1 for c in H.cell(e))] += mu
    return t


def degree_vector(ms: Mapping[Edge, int], H: ParamHypergraph | None = None) -> Counter:
    """Degree of each vertex, weighted by multiplicity.

    With ``H`` given, every vertex of ``H`` appears (possibly with degree 0).
    """
    deg = Counter({v: 0 for v in H.vertices}) if H is not None else Counter()
    for e, mu in ms.items():
        for v in e:
            deg[v] += mu
    return deg


def is_balanced(red: Mapping[Edge, int], blue: Mapping[Edge, int]) -> bool:
    """True iff both multisets have the same degree vector."""
    dr = +degree_vector(red)
    db = +degree_vector(blue)
    return dr == db


def contract_p1(e: Edge) -> tuple[Vertex, Vertex] | None:
    """Image of a size-3 or size-7 p1 hyperedge in A_n (alpha-beta) or K_n (rho-rho).

    Singletons have no image and map to ``None``.
    """
    if len(e) == 3:
        a = next(v for v in e if v.kind == "alpha")
        b = next(v for v in e if v.kind == "beta")
        return (a, b)
    if len(e) == 7:
        r1, r2 = (v for v in e if v.kind == "rho")
        return (r1, r2)
    return None


def phi(graph_edge: tuple[Vertex, Vertex]) -> Edge:
    """Inverse contraction: an A_n or K_n edge back to its p1 hyperedge."""
    u, v = graph_edge
    if {u.kind, v.kind} == {"alpha", "beta"}:
        a, b = (u, v) if u.kind == "alpha" else (v, u)
        return make_edge([a, b, lam(a.index[0], b.index[0])])
    if u.kind == v.kind == "rho":
        i, j = u.index[0], v.index[0]
        return make_edge([alpha(i), alpha(j), beta(i), beta(j), rho(i), rho(j), lam(i, j)])
    raise ValueError(f"{u}{v} is not an edge of A_n or K_n")


def lift(blue: Iterable, red: Iterable) -> tuple[EdgeMultiset, EdgeMultiset]:
    """Grow a balanced edge set on A_n u K_n into one on the p1 hypergraph.

    Lambda singletons are appended to whichever side has the smaller lambda degree.
    """
    big_b = EdgeMultiset(phi(e) for e in blue)
    big_r = EdgeMultiset(phi(e) for e in red)
    db = degree_vector(big_b)
    dr = degree_vector(big_r)
    lams = {v for v in db.keys() | dr.keys() if v.kind == "lambda"}
    for v in lams:
        gap = dr[v] - db[v]
        if gap > 0:
            big_b[(v,)] += gap
        elif gap < 0:
            big_r[(v,)] += -gap
    return big_b, big_r
