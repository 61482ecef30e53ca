"""Estimator-style wrappers around the p1 fit and the fiber-sampling test.

Both accept a :class:`DirectedGraph` or a square 0/1 adjacency matrix.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .moves import DEFAULT_MAX_SUBSET, MoveTypeWeights
from .netgraph import DirectedGraph
from .p1model import P1Fit, chi_square, fit_mle, log_likelihood
from .sampler import ChainConfig, run_chain, run_chains


def check_graph(X) -> DirectedGraph:
    """Coerce ``X`` to a :class:`DirectedGraph`."""
    if isinstance(X, DirectedGraph):
        return X
    a = check_array(X, ensure_2d=True, dtype=None, ensure_min_samples=2, ensure_min_features=2)
    return DirectedGraph.from_adjacency(a)


class P1Estimator(BaseEstimator):
    """Maximum-likelihood p1 fit by iterative proportional scaling.

    After ``fit``: ``fit_`` (per-dyad probabilities), ``params_``,
    ``n_iter_``, ``residual_`` and ``converged_``.
    """

    def __init__(self, tol=1e-8, max_iter=5000):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        g = check_graph(X)
        report = fit_mle(g, tol=self.tol, max_iter=self.max_iter)
        self.report_ = report
        self.fit_ = report.fit
        self.params_ = report.params
        self.n_iter_ = report.iterations
        self.residual_ = report.max_stat_residual
        self.converged_ = report.converged
        self.n_nodes_ = g.n
        return self

    def predict_proba(self, X=None):
        """``(C(n, 2), 4)`` array of ``(p00, p10, p01, p11)`` per dyad."""
        check_is_fitted(self, "fit_")
        return self.fit_.probs.copy()

    def expected_stats(self):
        check_is_fitted(self, "fit_")
        return self.fit_.expected_stats()

    def chi_square(self, X):
        check_is_fitted(self, "fit_")
        return chi_square(check_graph(X), self.fit_)

    def score(self, X, y=None):
        """Log-likelihood of ``X`` under the fitted model."""
        check_is_fitted(self, "fit_")
        return log_likelihood(check_graph(X), self.fit_)


class FiberGOFTest(BaseEstimator):
    """Goodness-of-fit p-value for p1 by a random walk on the observable fiber.

    After ``fit``: ``p_value_``, ``p_value_incl_burnin_``, ``gf_observed_``
    and ``results_`` (one chain result per chain).
    """

    def __init__(self, steps=100_000, burn_in=0, seed=0, c1=0.34, c2=0.33, c3=0.33,
                 max_subset=DEFAULT_MAX_SUBSET, chains=1, trace_every=1):
        self.steps = steps
        self.burn_in = burn_in
        self.seed = seed
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3
        self.max_subset = max_subset
        self.chains = chains
        self.trace_every = trace_every

    def _config(self) -> ChainConfig:
        return ChainConfig(steps=self.steps, burn_in=self.burn_in, seed=self.seed,
                           weights=MoveTypeWeights(self.c1, self.c2, self.c3),
                           trace_every=self.trace_every, max_subset=self.max_subset)

    def fit(self, X, y=None, fit: P1Fit | None = None):
        g = check_graph(X)
        cfg = self._config()
        if self.chains > 1:
            self.results_, self.p_value_ = run_chains(g, cfg, self.chains)
        else:
            self.results_ = [run_chain(g, cfg, fit)]
            self.p_value_ = self.results_[0].p_value
        hits = sum(r.p_value_incl_burnin * r.steps for r in self.results_)
        self.p_value_incl_burnin_ = hits / sum(r.steps for r in self.results_)
        self.gf_observed_ = self.results_[0].gf_observed
        self.gf_values_ = np.concatenate([r.gf_values for r in self.results_])
        return self
