"""Command line: ``csm run`` executes strategies, ``csm gen`` builds workloads."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .algorithms import STRATEGIES
from .framework import CapabilityError, format_match
from .graph import ParseError, dump_graph, dump_stream, load_graph, load_stream
from .harness import DEFAULT_TIME_LIMIT, HARD_UNSOLVED_RESULTS, metrics_csv, run_one
from .query import load_query
from .workload import (DISTRIBUTIONS, SHAPES, assign_labels, extract_queries, resolve_seed,
                       sample_stream)


def _cmd_run(args) -> int:
    g = load_graph(args.graph)
    stream = load_stream(args.stream)
    rows = []
    for qpath in args.query:
        q = load_query(qpath)
        for algo in args.algo:
            work = g.copy()
            on_step = None
            if args.print_matches:
                def on_step(step, ids=work.external_ids):
                    for m in step.matches:
                        print(format_match(step.sign, m, ids))
            try:
                rows.append(run_one(q, work, stream, algo, args.semantics, args.time_limit,
                                    args.max_results, args.hard_threshold, on_step=on_step,
                                    copy=False))
            except CapabilityError as exc:
                print(f"error: {algo} on {q.name}: {exc}", file=sys.stderr)
                return 2
    text = metrics_csv(rows)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _file_edge_order(path, g):
    """Edges in the order the graph file lists them."""
    edges = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split("#", 1)[0].split()
            if parts and parts[0] == "e":
                a, b = g.id_map[int(parts[1])], g.id_map[int(parts[2])]
                edges.append((a, b, g.edge_label(a, b)))
    return edges


def _cmd_gen_stream(args) -> int:
    g = load_graph(args.graph)
    op = "-" if args.delete else "+"
    init, stream = sample_stream(g, args.rate, args.mode, op, resolve_seed(args.seed),
                                 _file_edge_order(args.graph, g))
    dump_graph(init, args.out_graph)
    dump_stream(stream, args.out_stream)
    return 0


def _cmd_gen_labels(args) -> int:
    g = load_graph(args.graph)
    out = assign_labels(g, args.labels, args.distribution, resolve_seed(args.seed), args.target)
    dump_graph(out, args.out)
    return 0


def _cmd_gen_queries(args) -> int:
    g = load_graph(args.graph)
    qs = extract_queries(g, args.shape, args.size, args.count, resolve_seed(args.seed))
    os.makedirs(args.out_dir, exist_ok=True)
    for q in qs:
        with open(os.path.join(args.out_dir, q.name + ".txt"), "w", encoding="utf-8") as fh:
            fh.write(q.dumps())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csm", description="continuous subgraph matching")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run strategies over an update stream")
    r.add_argument("--graph", required=True)
    r.add_argument("--stream", required=True)
    r.add_argument("--query", required=True, action="append")
    r.add_argument("--algo", required=True, action="append", choices=list(STRATEGIES))
    r.add_argument("--semantics", choices=["homo", "iso"], default="homo")
    r.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT)
    r.add_argument("--max-results", type=int, default=None)
    r.add_argument("--hard-threshold", type=int, default=HARD_UNSOLVED_RESULTS)
    r.add_argument("--report", default=None, help="CSV output path (default: stdout)")
    r.add_argument("--print-matches", action="store_true",
                   help="print every incremental match instead of counting only")
    r.set_defaults(func=_cmd_run)

    gen = sub.add_parser("gen", help="workload generation")
    gsub = gen.add_subparsers(dest="what", required=True)

    s = gsub.add_parser("stream", help="split a graph into an initial graph and an update stream")
    s.add_argument("--graph", required=True)
    s.add_argument("--rate", type=float, default=0.1)
    s.add_argument("--mode", choices=["suffix", "random"], default="random")
    s.add_argument("--delete", action="store_true", help="emit deletions instead of insertions")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out-graph", required=True)
    s.add_argument("--out-stream", required=True)
    s.set_defaults(func=_cmd_gen_stream)

    lab = gsub.add_parser("labels", help="reassign labels")
    lab.add_argument("--graph", required=True)
    lab.add_argument("--labels", type=int, required=True)
    lab.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform")
    lab.add_argument("--target", choices=["vertex", "edge"], default="vertex")
    lab.add_argument("--seed", type=int, default=None)
    lab.add_argument("--out", required=True)
    lab.set_defaults(func=_cmd_gen_labels)

    qq = gsub.add_parser("queries", help="extract queries by random walks")
    qq.add_argument("--graph", required=True)
    qq.add_argument("--shape", choices=SHAPES, required=True)
    qq.add_argument("--size", type=int, required=True)
    qq.add_argument("--count", type=int, default=10)
    qq.add_argument("--seed", type=int, default=None)
    qq.add_argument("--out-dir", required=True)
    qq.set_defaults(func=_cmd_gen_queries)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
