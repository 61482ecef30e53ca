"""Command-line entry point: ``fibergof fit|gof|enumerate|diagnose|demo-independence``."""
from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter

from . import io
from .errors import FiberGOFError
from .fiber import enumerate_p1_fiber, fiber_coverage
from .hypergraph import independence_hypergraph, is_balanced, table_to_edges
from .moves import MoveTypeWeights, basic_moves, is_applicable
from .p1model import chi_square, fit_mle
from .sampler import ChainConfig, run_chain, run_chains, run_table_chain, tv_distance

logger = logging.getLogger("fibergof")


def _weights(args) -> MoveTypeWeights:
    return MoveTypeWeights(args.c1, args.c2, args.c3).validate()


def cmd_fit(args, out):
    net = io.parse_network(args.network, args.format)
    logger.info("fit: tol=%g max_iter=%d", args.tol, args.max_iter)
    report = fit_mle(net.graph, tol=args.tol, max_iter=args.max_iter)
    d = report.to_dict(net.labels)
    if args.out:
        io.write_json(args.out, d)
    print(f"nodes: {net.graph.n}", file=out)
    print(f"edges: {len(net.graph)}", file=out)
    print(f"iterations: {report.iterations}", file=out)
    print(f"max stat residual: {report.max_stat_residual:.6g}", file=out)
    print(f"converged: {str(report.converged).lower()}", file=out)
    if report.converged:
        print(f"chi-square: {chi_square(net.graph, report.fit):.6f}", file=out)
    if not args.out:
        out.write(io.write_json(None, d))
    return 0


def cmd_gof(args, out):
    net = io.parse_network(args.network, args.format)
    g = net.graph
    w = _weights(args)
    cfg = ChainConfig(steps=args.steps, burn_in=args.burnin, seed=args.seed, weights=w,
                      trace_every=args.trace_every, max_subset=args.max_subset)
    logger.info("gof: seed=%d weights=(%g, %g, %g) steps=%d burn_in=%d chains=%d",
                args.seed, *w, args.steps, args.burnin, args.chains)
    print(f"seed: {args.seed}", file=out)
    if args.chains > 1:
        results, pooled = run_chains(g, cfg, args.chains, args.processes)
    else:
        results = [run_chain(g, cfg)]
        pooled = results[0].p_value
    first = results[0]
    logger.info("MLE fit: %d iterations, residual %.3g", first.fit_iterations, first.fit_residual)
    print(f"GF_observed: {first.gf_observed:.6f}", file=out)
    for k, r in enumerate(results):
        tag = f"chain {k} (seed {r.seed}): " if args.chains > 1 else ""
        print(f"{tag}p-value: {r.p_value:.7f}", file=out)
        print(f"{tag}p-value incl. burn-in: {r.p_value_incl_burnin:.7f}", file=out)
        print(f"{tag}accepted: {r.accepted} trivial: {r.trivial} rejected: {r.rejected}", file=out)
    if args.chains > 1:
        print(f"pooled p-value: {pooled:.7f}", file=out)
    if args.trace:
        if args.chains > 1:
            rows = [(k,) + row for k, r in enumerate(results) for row in r.trace_rows]
            io.write_csv(args.trace, ("chain",) + io.TRACE_HEADER, rows)
        else:
            io.write_trace(args.trace, first)
    if args.hist:
        import numpy as np

        values = np.concatenate([r.gf_values for r in results])
        io.write_histogram(args.hist, values, args.bins)
    return 0


def cmd_enumerate(args, out):
    net = io.parse_network(args.network, args.format)
    f = enumerate_p1_fiber(net.graph, max_dyads=args.max_dyads)
    print(f"fiber size: {len(f)}", file=out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(io.format_fiber(f, net.graph.n))
    return 0


def cmd_diagnose(args, out):
    net = io.parse_network(args.network, args.format)
    g = net.graph
    f = enumerate_p1_fiber(g, max_dyads=args.max_dyads)
    w = _weights(args)
    logger.info("diagnose: seed=%d weights=(%g, %g, %g) steps=%d fiber=%d", args.seed, *w, args.steps, len(f))
    print(f"seed: {args.seed}", file=out)
    print(f"fiber size: {len(f)}", file=out)
    rows = []
    cover_step = []

    def record(step, state, hist):
        if not cover_step and len(hist) == len(f):
            cover_step.append(step)
        if step % args.every == 0 or step == args.steps:
            rows.append((step, len(hist), tv_distance(hist, len(f))))

    cfg = ChainConfig(steps=args.steps, seed=args.seed, weights=w, trace_every=args.steps,
                      track_visited=True, max_subset=args.max_subset)
    r = run_chain(g, cfg, on_step=record)
    visited, missing = fiber_coverage(r, f)
    print(f"distinct visited: {visited}", file=out)
    print(f"full coverage at step: {cover_step[0] if cover_step else 'never'}", file=out)
    print(f"final TV distance: {rows[-1][2]:.7f}", file=out)
    if args.out:
        io.write_csv(args.out, ("step", "distinctVisited", "tvDistance"), rows)
    return 0


def cmd_demo_independence(args, out):
    table = io.read_table(args.table)
    H = independence_hypergraph(*table.shape)
    e_u = table_to_edges(table, H)
    print(f"seed: {args.seed}", file=out)
    print(f"table shape: {table.shape[0]}x{table.shape[1]}", file=out)
    print(f"e(u) ({sum(e_u.values())} edges): {e_u}", file=out)
    basic = basic_moves(H)
    usable = [(r, b) for r, b in basic if is_applicable(e_u, r)]
    print(f"applicable basic moves: {len(usable)} of {len(basic)}", file=out)
    for r, b in usable:
        print(f"  R={r} B={b}", file=out)
    res = run_table_chain(table, args.steps, seed=args.seed, max_subset=args.max_subset, H=H, record_moves=True)
    counts = Counter((str(r), str(b)) for r, b in res.moves)
    print(f"sampled moves: {args.steps} steps, {res.accepted} accepted, {res.trivial} degenerate", file=out)
    certified = all(is_balanced(r, b) for r, b in res.moves)
    print(f"all sampled moves balanced: {str(certified).lower()}", file=out)
    shown = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[: args.show]
    for (r, b), c in shown:
        print(f"  {c}x R={r} B={b}", file=out)
    if args.out:
        rows = []
        for (r, b), c in sorted(counts.items()):
            rows.append((r, b, c))
        io.write_csv(args.out, ("R", "B", "count"), rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fibergof", description="Exact goodness-of-fit testing for the p1 network model.")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress log output on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def network(sp):
        sp.add_argument("network", help="edge list or Pajek file")
        sp.add_argument("--format", choices=("auto", "edgelist", "pajek"), default="auto")

    def walk(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--c1", type=float, default=0.34, help="Type 1 move weight")
        sp.add_argument("--c2", type=float, default=0.33, help="Type 2 move weight")
        sp.add_argument("--c3", type=float, default=0.33, help="Type 3 move weight")
        sp.add_argument("--max-subset", type=int, default=10)

    sp = sub.add_parser("fit", help="maximum-likelihood p1 fit")
    network(sp)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=5000)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("gof", help="estimate the goodness-of-fit p-value")
    network(sp)
    walk(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--burnin", type=int, default=0)
    sp.add_argument("--trace")
    sp.add_argument("--trace-every", type=int, default=1)
    sp.add_argument("--hist")
    sp.add_argument("--bins", type=int)
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--processes", type=int)
    sp.set_defaults(func=cmd_gof)

    sp = sub.add_parser("enumerate", help="enumerate the observable fiber")
    network(sp)
    sp.add_argument("--max-dyads", type=int, default=45)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("diagnose", help="coverage and TV distance against the enumerated fiber")
    network(sp)
    walk(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--every", type=int, default=1000)
    sp.add_argument("--max-dyads", type=int, default=45)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_diagnose)

    sp = sub.add_parser("demo-independence", help="moves for a two-way table under independence")
    sp.add_argument("--table", required=True)
    sp.add_argument("--steps", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-subset", type=int, default=10)
    sp.add_argument("--show", type=int, default=10)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_demo_independence)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, out)
    except (FiberGOFError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
