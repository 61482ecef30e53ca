"""Metropolis-Hastings walks on observable fibers and p-value estimation.

The p1 walk proposes one dynamically generated move per step. Because the
conditional law on a 0/1 fiber is uniform, every applicable proposal is
accepted; the acceptance ratio is still evaluated through
:func:`log_weight_ratio` so the same loop serves count tables, where
:func:`run_table_chain` walks independence-model fibers.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import moves
from .errors import InvalidSize, PreconditionViolation, StatMismatch, TooFewEdges
from .hypergraph import ParamHypergraph, independence_hypergraph, table_to_edges
from .moves import MoveTypeWeights
from .netgraph import DirectedGraph, DyadState, Move, dyads
from .p1model import P1Fit, chi_square, contribution_table, dyad_index, fit_mle

logger = logging.getLogger(__name__)

TRACK_VISITED_MAX_DYADS = 200
TIE_RTOL = 1e-9
RESYNC_EVERY = 10_000


@dataclass(frozen=True)
class ChainConfig:
    steps: int
    burn_in: int = 0
    seed: int = 0
    weights: MoveTypeWeights = MoveTypeWeights()
    trace_every: int = 1
    track_visited: bool | None = None  # None: on when the graph has <= 200 dyads
    max_subset: int = moves.DEFAULT_MAX_SUBSET

    def __post_init__(self):
        if self.burn_in < 0 or self.steps <= self.burn_in:
            raise ValueError(f"need steps > burn_in >= 0, got steps={self.steps}, burn_in={self.burn_in}")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")
        object.__setattr__(self, "weights", MoveTypeWeights(*self.weights).validate())


@dataclass
class ChainResult:
    p_value: float  # k / (steps - burn_in)
    p_value_incl_burnin: float  # k over all steps, burn-in included
    gf_observed: float
    gf_trace: list = field(default_factory=list)  # (step, chi-square)
    p_value_trace: list = field(default_factory=list)  # (step, running estimate)
    gf_values: np.ndarray | None = None  # chi-square after every post-burn-in step
    accepted: int = 0
    rejected: int = 0
    trivial: int = 0
    steps: int = 0
    burn_in: int = 0
    seed: int = 0
    distinct_visited: int | None = None
    visit_histogram: Counter | None = None
    final_state: DirectedGraph | None = None
    trace_rows: list = field(default_factory=list)
    fit_iterations: int = 0
    fit_residual: float = 0.0


def conditional_weight(u) -> float:
    """Unnormalized conditional probability of a fiber point.

    ``prod 1/u_cell!``; a p1 network has every cell in {0, 1}, so its weight is 1.
    """
    if isinstance(u, DirectedGraph):
        return 1.0
    t = np.asarray(u)
    return math.exp(-sum(math.lgamma(int(x) + 1) for x in t.ravel()))


def log_weight_ratio(changes) -> float:
    """``log f(u+m) - log f(u)`` from ``(old, new)`` counts of the changed cells only."""
    return sum(math.lgamma(old + 1) - math.lgamma(new + 1) for old, new in changes)


def tv_distance(hist, fiber_size: int) -> float:
    """Total variation distance between visit frequencies and uniform on the fiber."""
    if fiber_size < len(hist):
        raise InvalidSize(f"histogram has {len(hist)} distinct states but fiber size is {fiber_size}")
    total = sum(hist.values())
    if total == 0:
        raise ValueError("empty histogram")
    u = 1.0 / fiber_size
    acc = math.fsum(abs(c / total - u) for c in hist.values())
    acc += (fiber_size - len(hist)) * u
    return 0.5 * acc


# per-state contributions to (out_i, in_i, out_j, in_j, recip_i = recip_j)
_EFFECT = {
    DyadState.NULL: (0, 0, 0, 0, 0),
    DyadState.OUT: (1, 0, 0, 1, 0),
    DyadState.IN: (0, 1, 1, 0, 0),
    DyadState.MUTUAL: (1, 1, 1, 1, 1),
}


class _ChainState:
    """Mutable walk state exposing the generator view (edges + indexable pools)."""

    def __init__(self, g: DirectedGraph):
        self.n = g.n
        self.edges = set(g.edges)
        self.mutual_pairs = list(g.mutual_pairs)
        self.unreciprocated = list(g.unreciprocated)
        self._mpos = {p: k for k, p in enumerate(self.mutual_pairs)}
        self._upos = {e: k for k, e in enumerate(self.unreciprocated)}

    def state(self, i, j) -> int:
        return ((i, j) in self.edges) + 2 * ((j, i) in self.edges)

    @staticmethod
    def _drop(pool, pos, item):
        k = pos.pop(item)
        last = pool.pop()
        if k < len(pool):
            pool[k] = last
            pos[last] = k

    @staticmethod
    def _push(pool, pos, item):
        pos[item] = len(pool)
        pool.append(item)

    def apply(self, m: Move) -> list[tuple]:
        """Apply in place; returns ``(dyad, old_state, new_state)`` for every touched dyad."""
        edges = self.edges
        if not m.remove <= edges:
            raise PreconditionViolation("edges to remove not present")
        touched = {(min(e), max(e)) for e in m.remove}
        touched.update((min(e), max(e)) for e in m.add)
        old = {d: self.state(*d) for d in touched}
        edges.difference_update(m.remove)
        if not edges.isdisjoint(m.add):
            edges.update(m.remove)
            raise PreconditionViolation("edges to add already present")
        edges.update(m.add)
        changes = []
        delta = Counter()
        for d in touched:
            i, j = d
            s0 = old[d]
            s1 = self.state(i, j)
            if s0 == s1:
                continue
            changes.append((d, s0, s1))
            e0, e1 = _EFFECT[s0], _EFFECT[s1]
            delta[("out", i)] += e1[0] - e0[0]
            delta[("in", i)] += e1[1] - e0[1]
            delta[("out", j)] += e1[2] - e0[2]
            delta[("in", j)] += e1[3] - e0[3]
            delta[("rec", i)] += e1[4] - e0[4]
            delta[("rec", j)] += e1[4] - e0[4]
            self._retire(d, s0)
            self._enlist(d, s1)
        if any(delta.values()):
            raise StatMismatch(f"move changes sufficient statistics: {dict(+delta)} {dict(-delta)}")
        return changes

    def _retire(self, d, s):
        i, j = d
        if s == DyadState.MUTUAL:
            self._drop(self.mutual_pairs, self._mpos, d)
        elif s == DyadState.OUT:
            self._drop(self.unreciprocated, self._upos, (i, j))
        elif s == DyadState.IN:
            self._drop(self.unreciprocated, self._upos, (j, i))

    def _enlist(self, d, s):
        i, j = d
        if s == DyadState.MUTUAL:
            self._push(self.mutual_pairs, self._mpos, d)
        elif s == DyadState.OUT:
            self._push(self.unreciprocated, self._upos, (i, j))
        elif s == DyadState.IN:
            self._push(self.unreciprocated, self._upos, (j, i))

    def key(self) -> tuple:
        return tuple(sorted(self.edges))

    def graph(self) -> DirectedGraph:
        return DirectedGraph(self.n, frozenset(self.edges))


def _gf_of(state: _ChainState, table) -> float:
    n = state.n
    return math.fsum(table[dyad_index(n, i, j)][state.state(i, j)] for i, j in dyads(n))


def run_chain(g: DirectedGraph, cfg: ChainConfig, fit: P1Fit | None = None, on_step=None) -> ChainResult:
    """Estimate ``P(chi2(G) >= chi2(g))`` over the observable p1 fiber of ``g``.

    The MLE is computed once (unless ``fit`` is supplied). A step counts toward
    the estimate when the current state's statistic ties or exceeds the
    observed one; burn-in steps move the chain but are not counted.
    ``on_step(step, state, visit_histogram)`` is called after every step when given.
    """
    if len(g.edges) <= 2:
        raise TooFewEdges(f"the walk needs more than 2 edges, graph has {len(g.edges)}")
    fit_iterations, fit_residual = 0, 0.0
    if fit is None:
        report = fit_mle(g)
        fit, fit_iterations, fit_residual = report.fit, report.iterations, report.max_stat_residual
    gf_obs = chi_square(g, fit)
    table = contribution_table(fit).tolist()
    n = g.n
    threshold = gf_obs - TIE_RTOL * max(1.0, abs(gf_obs))
    track = cfg.track_visited
    if track is None:
        track = n * (n - 1) // 2 <= TRACK_VISITED_MAX_DYADS

    rng = moves.make_rng(cfg.seed)
    state = _ChainState(g)
    gf = gf_obs
    hist = Counter({g.canonical: 1}) if track else None
    k_post = 0
    k_all = 0
    accepted = rejected = trivial = 0
    gf_values = np.empty(cfg.steps - cfg.burn_in)
    gf_trace, p_trace, rows = [], [], []
    weights = cfg.weights
    cap = cfg.max_subset
    last_key = g.canonical

    for step in range(1, cfg.steps + 1):
        m = moves.gen_move(state, weights, rng, cap)
        moved = False
        if m.trivial:
            trivial += 1
        else:
            # removed cells go 1 -> 0 and added cells 0 -> 1, so the ratio is exactly 1
            log_q = log_weight_ratio([(1, 0)] * len(m.remove) + [(0, 1)] * len(m.add))
            if log_q >= 0 or rng.random() < math.exp(log_q):
                for d, s0, s1 in state.apply(m):
                    row = table[dyad_index(n, *d)]
                    gf += row[s1] - row[s0]
                accepted += 1
                moved = True
            else:
                rejected += 1
        if step % RESYNC_EVERY == 0:
            gf = _gf_of(state, table)
        if track:
            # trivial or rejected steps revisit the current state
            key = state.key() if moved else last_key
            hist[key] += 1
            last_key = key
        hit = gf >= threshold
        k_all += hit
        post = step > cfg.burn_in
        if post:
            k_post += hit
            gf_values[step - cfg.burn_in - 1] = gf
        if on_step is not None:
            on_step(step, state, hist)
        if step % cfg.trace_every == 0 or step == cfg.steps:
            n_post = step - cfg.burn_in
            running = k_post / n_post if post else None
            gf_trace.append((step, gf))
            if post:
                p_trace.append((step, running))
            rows.append((step, gf, int(moved), int(m.trivial), running, k_all / step,
                         len(hist) if track else None))
    n_post = cfg.steps - cfg.burn_in
    result = ChainResult(
        p_value=k_post / n_post,
        p_value_incl_burnin=k_all / cfg.steps,
        gf_observed=gf_obs,
        gf_trace=gf_trace,
        p_value_trace=p_trace,
        gf_values=gf_values,
        accepted=accepted,
        rejected=rejected,
        trivial=trivial,
        steps=cfg.steps,
        burn_in=cfg.burn_in,
        seed=cfg.seed,
        distinct_visited=len(hist) if track else None,
        visit_histogram=hist,
        final_state=state.graph(),
        trace_rows=rows,
        fit_iterations=fit_iterations,
        fit_residual=fit_residual,
    )
    logger.info("chain seed=%s steps=%d burn_in=%d: p=%.6g accepted=%d trivial=%d",
                cfg.seed, cfg.steps, cfg.burn_in, result.p_value, accepted, trivial)
    return result


def _run_one(args):
    g, cfg, fit = args
    return run_chain(g, cfg, fit)


def chain_seeds(seed: int, chains: int) -> list[int]:
    """Independent per-chain seeds derived from one master seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(chains)]


def run_chains(g: DirectedGraph, cfg: ChainConfig, chains: int, processes: int | None = None):
    """Run independent chains (distinct derived seeds) in parallel.

    Returns ``(results, pooled_p_value)``; the pooled estimate is total hits
    over total post-burn-in steps.
    """
    from concurrent.futures import ProcessPoolExecutor
    from dataclasses import replace

    fit = fit_mle(g).fit
    cfgs = [replace(cfg, seed=s) for s in chain_seeds(cfg.seed, chains)]
    if chains == 1:
        results = [run_chain(g, cfgs[0], fit)]
    else:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            results = list(pool.map(_run_one, [(g, c, fit) for c in cfgs]))
    n_post = sum(r.steps - r.burn_in for r in results)
    hits = sum(round(r.p_value * (r.steps - r.burn_in)) for r in results)
    return results, hits / n_post


@dataclass
class TableChainResult:
    visit_histogram: Counter
    moves: list  # (R, B) of every accepted non-trivial move, when recorded
    accepted: int
    trivial: int
    final_table: np.ndarray


def _falling(m: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= m - t
    return out


def run_table_chain(table, steps: int, seed=0, max_subset: int = moves.DEFAULT_MAX_SUBSET,
                    H: ParamHypergraph | None = None, record_moves: bool = False) -> TableChainResult:
    """Metropolis-Hastings walk on the fiber of a two-way table under independence.

    Proposals come from :func:`moves.gen_bipartite_move`; the target is the
    hypergeometric law ``prod 1/u_cell!``. Edge copies are drawn uniformly, so
    the proposal is not symmetric and the Hastings correction
    ``prod (mu_v)_b / prod (mu_u)_r`` enters the acceptance ratio.
    """
    t = np.asarray(table, dtype=np.int64)
    H = H or independence_hypergraph(*t.shape)
    rng = moves.make_rng(seed)
    e_u = table_to_edges(t, H)
    cur = t.copy()
    key = cur.tobytes()
    hist = Counter({key: 1})
    accepted = trivial = 0
    recorded = []
    for _ in range(steps):
        red, blue = moves.gen_bipartite_move(e_u, H, rng, max_subset)
        if not red:
            trivial += 1
            hist[key] += 1
            continue
        cells = set(red) | set(blue)
        after = {c: e_u[c] - red[c] + blue[c] for c in cells}
        log_f = log_weight_ratio((e_u[c], after[c]) for c in cells)
        log_prop = sum(math.log(_falling(after[c], blue[c])) for c in blue) - sum(
            math.log(_falling(e_u[c], red[c])) for c in red
        )
        log_q = log_f + log_prop
        if log_q >= -1e-12 or rng.random() < math.exp(log_q):
            for c, mu in after.items():
                if mu:
                    e_u[c] = mu
                else:
                    del e_u[c]
                cur[tuple(k - 1 for k in H.cell(c))] = mu
            key = cur.tobytes()
            accepted += 1
            if record_moves:
                recorded.append((red, blue))
        hist[key] += 1
    return TableChainResult(hist, recorded, accepted, trivial, cur)
