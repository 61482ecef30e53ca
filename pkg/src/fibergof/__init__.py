"""Exact goodness-of-fit testing for the p1 random-graph model.

Moves that stay inside the observable fiber are generated on the fly from the
model's parameter hypergraph, so no Markov basis is ever computed.
"""
from .errors import (FiberGOFError, InvalidGraph, PreconditionViolation, StatMismatch, InvalidSize, ShapeMismatch, DegenerateFit, TooFewEdges, TooLarge, Infeasible, OracleViolation, ParseError, DuplicateEdge, SelfLoop)
from .estimators import FiberGOFTest, P1Estimator, check_graph
from .fiber import Fiber, enumerate_p1_fiber, enumerate_table_fiber, enumerate_undirected_fiber, fiber_coverage
from .hypergraph import (
    EdgeMultiset,
    ParamHypergraph,
    independence_hypergraph,
    lift,
    p1_hypergraph,
    quasi_independence_hypergraph,
    table_to_edges,
)
from .io import parse_network
from .moves import MoveTypeWeights, gen_bipartite_move, gen_move, gen_type1, gen_type2, gen_type3
from .netgraph import TRIVIAL, DirectedGraph, DyadState, Move, apply_move, suff_stats
from .p1model import FitReport, P1Fit, P1Params, chi_square, fit_mle
from .sampler import ChainConfig, ChainResult, conditional_weight, run_chain, run_chains, run_table_chain, tv_distance

__version__ = "0.1.0"
