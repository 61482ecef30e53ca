"""Holland-Leinhardt p1 model with edge-dependent reciprocation.

Parameters are kept in multiplicative form: per dyad ``i < j``

    p00 = lam_ij
    p10 = lam_ij * alpha_i * beta_j
    p01 = lam_ij * alpha_j * beta_i
    p11 = lam_ij * alpha_i * beta_j * alpha_j * beta_i * rho_i * rho_j

with ``lam_ij`` the per-dyad normalizer. The maximum-likelihood fit is found by
iterative proportional scaling: each out-, in- and reciprocation margin is
matched in turn by rescaling its multiplicative parameter, then every dyad is
renormalized.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateFit, InvalidSize
from .netgraph import DirectedGraph, dyads, suff_stats

logger = logging.getLogger(__name__)

PARAM_FLOOR = 1e-10
PROB_FLOOR = 1e-12


def dyad_index(n: int, i: int, j: int) -> int:
    """Position of dyad ``(i, j)``, ``i < j``, in :func:`netgraph.dyads` order."""
    return (i - 1) * n - (i - 1) * i // 2 + (j - i - 1)


@dataclass(frozen=True)
class P1Params:
    alpha: np.ndarray
    beta: np.ndarray
    rho: np.ndarray
    lam: np.ndarray  # (n, n) symmetric, diagonal unused

    @property
    def n(self):
        return len(self.alpha)

    @classmethod
    def uniform(cls, n: int) -> "P1Params":
        lam = np.full((n, n), 0.25)
        np.fill_diagonal(lam, 0.0)
        return cls(np.ones(n), np.ones(n), np.ones(n), lam)

    def normalized(self) -> "P1Params":
        """Same alpha, beta, rho with every lambda set to its dyad normalizer."""
        return P1Params(self.alpha, self.beta, self.rho, _normalizer(self.alpha, self.beta, self.rho))


@lru_cache(maxsize=64)
def _triu(n):
    return np.triu_indices(n, k=1)


def _monomials(alpha, beta, rho):
    a = np.outer(alpha, beta)  # a[i, j] = alpha_i beta_j
    m = a * a.T * np.outer(rho, rho)
    return a, m


def _normalizer(alpha, beta, rho):
    a, m = _monomials(alpha, beta, rho)
    lam = 1.0 / (1.0 + a + a.T + m)
    np.fill_diagonal(lam, 0.0)
    return lam


def dyad_probs(params: P1Params, i: int, j: int) -> tuple[float, float, float, float]:
    """``(p00, p10, p01, p11)`` for the dyad ``i < j`` (1-based)."""
    if not i < j:
        raise ValueError(f"need i < j, got ({i}, {j})")
    al, be, rh = params.alpha, params.beta, params.rho
    a, b = i - 1, j - 1
    lam = params.lam[a, b]
    p10 = lam * al[a] * be[b]
    p01 = lam * al[b] * be[a]
    p11 = lam * al[a] * be[b] * al[b] * be[a] * rh[a] * rh[b]
    return float(lam), float(p10), float(p01), float(p11)


@dataclass(frozen=True)
class P1Fit:
    """Fitted configuration probabilities, one row ``(p00, p10, p01, p11)`` per dyad."""

    n: int
    probs: np.ndarray  # (C(n, 2), 4), rows in dyads(n) order

    def prob(self, i: int, j: int) -> np.ndarray:
        return self.probs[dyad_index(self.n, i, j)]

    @classmethod
    def from_params(cls, params: P1Params) -> "P1Fit":
        n = params.n
        iu, ju = _triu(n)
        a, m = _monomials(params.alpha, params.beta, params.rho)
        lam = params.lam[iu, ju]
        probs = np.column_stack([lam, lam * a[iu, ju], lam * a.T[iu, ju], lam * m[iu, ju]])
        return cls(n, probs)

    def expected_stats(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Expected out-degree, in-degree and reciprocated degree of every node."""
        n = self.n
        iu, ju = _triu(n)
        p = self.probs
        out = np.zeros(n)
        inn = np.zeros(n)
        rec = np.zeros(n)
        # i -> j present in OUT and MUTUAL; j -> i in IN and MUTUAL
        np.add.at(out, iu, p[:, 1] + p[:, 3])
        np.add.at(inn, ju, p[:, 1] + p[:, 3])
        np.add.at(out, ju, p[:, 2] + p[:, 3])
        np.add.at(inn, iu, p[:, 2] + p[:, 3])
        np.add.at(rec, iu, p[:, 3])
        np.add.at(rec, ju, p[:, 3])
        return out, inn, rec


@dataclass(frozen=True)
class FitReport:
    fit: P1Fit
    params: P1Params
    iterations: int
    max_stat_residual: float
    converged: bool
    tol: float

    def to_dict(self, labels=None) -> dict:
        n = self.fit.n
        labels = labels or [str(i) for i in range(1, n + 1)]
        return {
            "n": n,
            "tol": self.tol,
            "iterations": self.iterations,
            "max_stat_residual": self.max_stat_residual,
            "converged": self.converged,
            "labels": list(labels),
            "dyads": [
                {"i": i, "j": j, "probs": [float(x) for x in self.fit.probs[k]]}
                for k, (i, j) in enumerate(dyads(n))
            ],
        }


def _residual(fit: P1Fit, obs_out, obs_in, obs_rec) -> float:
    out, inn, rec = fit.expected_stats()
    return float(
        max(np.abs(out - obs_out).max(), np.abs(inn - obs_in).max(), np.abs(rec - obs_rec).max())
    )


def fit_mle(g: DirectedGraph, tol: float = 1e-8, max_iter: int = 5000, floor: float = PARAM_FLOOR) -> FitReport:
    """Maximum-likelihood p1 fit by iterative proportional scaling.

    Margins with observed value 0 pin their parameter to ``floor``. If
    ``max_iter`` cycles pass without reaching ``tol`` the last iterate is
    returned with ``converged=False``.
    """
    n = g.n
    if n < 2:
        raise InvalidSize(f"p1 fit needs at least 2 nodes, got {n}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    obs_out, obs_in, obs_rec = (np.asarray(s, dtype=float) for s in suff_stats(g))

    p = P1Params.uniform(n)
    al, be, rh, lam = p.alpha.copy(), p.beta.copy(), p.rho.copy(), p.lam.copy()
    rows = [np.arange(n) != k for k in range(n)]

    def scale(obs, k, current, expected):
        if obs[k] == 0:
            return floor
        return current * obs[k] / expected

    residual = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        # Gauss-Seidel sweeps on the unnormalized measure; each one matches one margin exactly
        for k in range(n):
            o = rows[k]
            e = al[k] * np.sum(lam[k, o] * be[o] * (1.0 + al[o] * be[k] * rh[k] * rh[o]))
            al[k] = scale(obs_out, k, al[k], e)
        for k in range(n):
            o = rows[k]
            e = be[k] * np.sum(lam[k, o] * al[o] * (1.0 + al[k] * be[o] * rh[k] * rh[o]))
            be[k] = scale(obs_in, k, be[k], e)
        for k in range(n):
            o = rows[k]
            e = rh[k] * np.sum(lam[k, o] * al[k] * be[o] * al[o] * be[k] * rh[o])
            rh[k] = scale(obs_rec, k, rh[k], e)
        lam = _normalizer(al, be, rh)
        fit = P1Fit.from_params(P1Params(al, be, rh, lam))
        residual = _residual(fit, obs_out, obs_in, obs_rec)
        if residual <= tol:
            break
    params = P1Params(al.copy(), be.copy(), rh.copy(), lam)
    report = FitReport(P1Fit.from_params(params), params, it, residual, residual <= tol, tol)
    log = logger.info if report.converged else logger.warning
    log("p1 IPS: %d iterations, residual %.3g, converged=%s", it, residual, report.converged)
    return report


def contribution_table(fit: P1Fit, floor: float = PROB_FLOOR) -> np.ndarray:
    """``table[d, c]``: chi-square contribution of dyad ``d`` observed in state ``c``."""
    p = fit.probs
    denom = np.maximum(p, floor)
    base = np.sum(p * p / denom, axis=1)  # all indicators zero
    # switching indicator c on: (1 - p_c)^2 - p_c^2 = 1 - 2 p_c
    return base[:, None] + (1.0 - 2.0 * p) / denom


def chi_square(g: DirectedGraph, fit: P1Fit, floor: float = PROB_FLOOR) -> float:
    """Sum over dyads and configurations of ``(indicator - p)^2 / p``."""
    if fit.n != g.n:
        raise ValueError(f"fit covers {fit.n} nodes, graph has {g.n}")
    total = 0.0
    for k, (i, j) in enumerate(dyads(g.n)):
        s = g.dyad_state(i, j)
        p = fit.probs[k]
        if p[s] < floor:
            raise DegenerateFit(f"dyad ({i}, {j}) observed in state {s.name} with fitted probability {p[s]:.3g}")
        ind = np.zeros(4)
        ind[s] = 1.0
        total += float(np.sum((ind - p) ** 2 / np.maximum(p, floor)))
    return total


def log_likelihood(g: DirectedGraph, fit: P1Fit) -> float:
    states = [g.dyad_state(i, j) for i, j in dyads(g.n)]
    return float(np.sum(np.log(fit.probs[np.arange(len(states)), states])))
