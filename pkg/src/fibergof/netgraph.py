"""Simple directed graphs, dyad states and p1 sufficient statistics.

Nodes are dense integer labels ``1..n``. Graphs are immutable; every
fiber point visited by a chain is a :class:`DirectedGraph`.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidGraph, PreconditionViolation, StatMismatch

Arc = tuple[int, int]
Pair = tuple[int, int]


class DyadState(enum.IntEnum):
    """Configuration of the unordered pair ``{i, j}`` with ``i < j``.

    The integer values index the probability 4-vector ``(p00, p10, p01, p11)``.
    """

    NULL = 0
    OUT = 1  # i -> j only
    IN = 2  # j -> i only
    MUTUAL = 3


def dyads(n: int) -> list[Pair]:
    """All unordered pairs ``(i, j)``, ``1 <= i < j <= n``, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidGraph(f"node count must be a positive integer, got {self.n!r}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if i == j:
                raise InvalidGraph(f"self-loop at node {i}")
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise InvalidGraph(f"edge ({i}, {j}) outside 1..{self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_adjacency(cls, adj) -> "DirectedGraph":
        a = np.asarray(adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidGraph(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise InvalidGraph("adjacency entries must be 0/1")
        if np.any(np.diag(a)):
            raise InvalidGraph("adjacency has nonzero diagonal")
        rows, cols = np.nonzero(a)
        return cls(a.shape[0], frozenset(zip((rows + 1).tolist(), (cols + 1).tolist())))

    def to_adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for i, j in self.edges:
            a[i - 1, j - 1] = 1
        return a

    def __len__(self):
        return len(self.edges)

    def __contains__(self, arc):
        return arc in self.edges

    @cached_property
    def canonical(self) -> tuple[Arc, ...]:
        """Lexicographically sorted edge tuple; the identity of a labeled graph."""
        return tuple(sorted(self.edges))

    @cached_property
    def mutual_pairs(self) -> tuple[Pair, ...]:
        return tuple(sorted((i, j) for i, j in self.edges if i < j and (j, i) in self.edges))

    @cached_property
    def unreciprocated(self) -> tuple[Arc, ...]:
        return tuple(sorted(e for e in self.edges if (e[1], e[0]) not in self.edges))

    def dyad_state(self, i: int, j: int) -> DyadState:
        """State of the dyad {i, j}, read with the smaller node first."""
        if i > j:
            i, j = j, i
        fwd = (i, j) in self.edges
        bwd = (j, i) in self.edges
        return DyadState(fwd + 2 * bwd)

    def dyad_states(self) -> dict[Pair, DyadState]:
        """State of every dyad of the complete node set (Null dyads included)."""
        return {d: self.dyad_state(*d) for d in dyads(self.n)}


class SufficientStats(NamedTuple):
    out_deg: tuple[int, ...]
    in_deg: tuple[int, ...]
    recip_deg: tuple[int, ...]


@dataclass(frozen=True)
class Move:
    """Edges to delete and edges to insert; mutual pairs carry both orientations."""

    remove: frozenset = frozenset()
    add: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "remove", frozenset(self.remove))
        object.__setattr__(self, "add", frozenset(self.add))
        if self.remove & self.add:
            raise PreconditionViolation("move removes and adds the same edge")

    @property
    def trivial(self) -> bool:
        return not self.remove and not self.add

    def inverse(self) -> "Move":
        return Move(self.add, self.remove)


TRIVIAL = Move()


def decompose(g: DirectedGraph) -> tuple[DirectedGraph, DirectedGraph]:
    """Split ``g`` into its reciprocated part and its unreciprocated part."""
    gu = frozenset(e for e in g.edges if (e[1], e[0]) in g.edges)
    return DirectedGraph(g.n, gu), DirectedGraph(g.n, g.edges - gu)


def undir(g: DirectedGraph | Iterable[Arc]) -> frozenset:
    """Skeleton edges as sorted pairs ``(min, max)``."""
    edges = g.edges if isinstance(g, DirectedGraph) else g
    return frozenset((min(e), max(e)) for e in edges)


def recip(pairs: Iterable[Pair]) -> frozenset:
    """Both orientations of every pair."""
    out = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return frozenset(out)


def suff_stats(g: DirectedGraph) -> SufficientStats:
    out = [0] * g.n
    inn = [0] * g.n
    rec = [0] * g.n
    for i, j in g.edges:
        out[i - 1] += 1
        inn[j - 1] += 1
        if (j, i) in g.edges:
            rec[i - 1] += 1
    return SufficientStats(tuple(out), tuple(inn), tuple(rec))


def _stat_delta(edges: frozenset, move: Move, result: frozenset) -> Counter:
    # per-node changes of (out, in, recip); only dyads touched by the move matter
    delta: Counter = Counter()
    for i, j in move.add:
        delta[("out", i)] += 1
        delta[("in", j)] += 1
    for i, j in move.remove:
        delta[("out", i)] -= 1
        delta[("in", j)] -= 1
    for i, j in undir(move.add | move.remove):
        before = (i, j) in edges and (j, i) in edges
        after = (i, j) in result and (j, i) in result
        if before != after:
            step = 1 if after else -1
            delta[("rec", i)] += step
            delta[("rec", j)] += step
    return Counter({k: v for k, v in delta.items() if v})


def apply_move(g: DirectedGraph, m: Move) -> DirectedGraph:
    """Apply ``m`` to ``g``, verifying that sufficient statistics are unchanged."""
    if m.trivial:
        return g
    missing = m.remove - g.edges
    if missing:
        raise PreconditionViolation(f"edges to remove not present: {sorted(missing)}")
    kept = g.edges - m.remove
    clash = m.add & kept
    if clash:
        raise PreconditionViolation(f"edges to add already present: {sorted(clash)}")
    result = kept | m.add
    delta = _stat_delta(g.edges, m, result)
    if delta:
        raise StatMismatch(f"move changes sufficient statistics: {dict(delta)}")
    return DirectedGraph(g.n, result)
