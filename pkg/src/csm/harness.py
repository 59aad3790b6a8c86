"""Benchmark driver: run (query x strategy) grids and summarize them."""

from __future__ import annotations

import csv
import io
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable

from .algorithms import IndexMemoryExceeded, make_strategy
from .framework import CapabilityError, run_stream
from .graph import DELETE, LabeledGraph, UpdateStream
from .query import QueryGraph

log = logging.getLogger(__name__)

SOLVED = "solved"
UNSOLVED = "unsolved"
HARD_UNSOLVED = "hard-unsolved"
OUT_OF_MEMORY = "out-of-memory"

DEFAULT_TIME_LIMIT = 60.0
HARD_UNSOLVED_RESULTS = 10 ** 9

CSV_COLUMNS = ["query_id", "algo", "status", "offline_ms", "index_ms", "enum_ms", "results",
               "emp", "vis", "inv", "candidates_total", "update_p99_ms"]


@dataclass
class RunMetrics:
    query_id: str
    algo: str
    status: str
    offline_ms: float = 0.0
    index_ms: float = 0.0
    enum_ms: float = 0.0
    results: int = 0
    emp: int = 0
    vis: int = 0
    inv: int = 0
    candidates_total: int | None = None
    update_p99_ms: float = 0.0
    peak_cached: int | None = None

    @property
    def query_ms(self) -> float:
        return self.index_ms + self.enum_ms

    @property
    def unsolved(self) -> bool:
        return self.status in (UNSOLVED, HARD_UNSOLVED)

    def row(self) -> list:
        out = []
        for name in CSV_COLUMNS:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(f"{v:.3f}")
            else:
                out.append(v)
        return out


def classify_status(timed_out: bool, results: int, threshold: int = HARD_UNSOLVED_RESULTS) -> str:
    """Unsolved when the time limit was hit; hard-unsolved if fewer than ``threshold`` results."""
    if not timed_out:
        return SOLVED
    return HARD_UNSOLVED if results < threshold else UNSOLVED


def _p99(values: list[float]) -> float:
    if not values:
        return 0.0
    if len(values) == 1:
        return values[0]
    return statistics.quantiles(values, n=100, method="inclusive")[98]


def supports(algo: str, q: QueryGraph, stream: UpdateStream) -> bool:
    s = make_strategy(algo)
    if not s.caps.cyclic_queries and not q.is_tree():
        return False
    if not s.caps.edge_delete and any(u.op == DELETE for b in stream for u in b):
        return False
    return True


def run_one(q: QueryGraph, g: LabeledGraph, stream: UpdateStream, algo: str,
            semantics: str = "homo", time_limit: float | None = DEFAULT_TIME_LIMIT,
            max_results: int | None = None, hard_threshold: int = HARD_UNSOLVED_RESULTS,
            on_step=None, strategy=None, copy: bool = True) -> RunMetrics:
    """One strategy over one query.  ``g`` is copied first unless ``copy`` is false.

    Matches are only materialized when ``on_step`` wants to see them.
    """
    strategy = strategy or make_strategy(algo)
    try:
        out = run_stream(q, g.copy() if copy else g, stream, strategy, semantics, max_results,
                         time_limit, collect=on_step is not None, on_step=on_step)
    except IndexMemoryExceeded:
        return RunMetrics(q.name, algo, OUT_OF_MEMORY, peak_cached=getattr(strategy, "peak_cached", None))
    c = out.counters
    status = classify_status(out.status != SOLVED, c.results, hard_threshold)
    return RunMetrics(q.name, algo, status, out.offline_time * 1e3, c.index_time * 1e3,
                      c.enum_time * 1e3, c.results, c.emp, c.vis, c.inv, out.candidates_total,
                      _p99(out.latencies) * 1e3, out.peak_cached)


def run_benchmark(g: LabeledGraph, stream: UpdateStream, queries: Iterable[QueryGraph],
                  algos: Iterable[str], semantics: str = "homo",
                  time_limit: float | None = DEFAULT_TIME_LIMIT, max_results: int | None = None,
                  hard_threshold: int = HARD_UNSOLVED_RESULTS, workers: int = 1) -> list[RunMetrics]:
    """Every supported (query, strategy) pair; unsupported pairs are skipped and logged.

    With ``workers > 1`` the cells run in separate processes, each on its own
    copy of the graph.  Rows come back in grid order either way.
    """
    algos = list(algos)
    cells = []
    for q in queries:
        for algo in algos:
            if not supports(algo, q, stream):
                log.info("skipping %s on %s: outside its capabilities", algo, q.name)
                continue
            cells.append((q, g, stream, algo, semantics, time_limit, max_results, hard_threshold))
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    return [r for r in results if r is not None]


def _run_cell(cell) -> RunMetrics | None:
    q, algo = cell[0], cell[3]
    try:
        return run_one(*cell)
    except CapabilityError as exc:
        log.info("skipping %s on %s: %s", algo, q.name, exc)
        return None


def metrics_csv(rows: Iterable[RunMetrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def read_metrics_csv(text: str) -> list[RunMetrics]:
    out = []
    types = {f.name: f.type for f in fields(RunMetrics)}
    for rec in csv.DictReader(io.StringIO(text)):
        kw = {}
        for k, v in rec.items():
            t = types.get(k)
            if v == "":
                kw[k] = None
            elif "int" in str(t):
                kw[k] = int(v)
            elif "float" in str(t):
                kw[k] = float(v)
            else:
                kw[k] = v
        out.append(RunMetrics(**kw))
    return out


# -- summary metrics ------------------------------------------------------------------------


def individual_speedup(times_a: dict[str, float], times_b: dict[str, float],
                       queries: Iterable[str] | None = None) -> float:
    """Mean over queries of ``t_B / t_A``: how many times faster A is than B."""
    qs = list(queries) if queries is not None else sorted(times_a)
    if not qs:
        raise ValueError("no queries")
    return sum(times_b[q] / times_a[q] for q in qs) / len(qs)


def relative_performance(table: dict[str, dict[str, float]],
                         queries: Iterable[str] | None = None) -> dict[str, float]:
    """Per method, the mean over queries of its value divided by the best (largest) value."""
    methods = list(table)
    if queries is None:
        qs = sorted(set.intersection(*(set(v) for v in table.values()))) if methods else []
    else:
        qs = list(queries)
    out = {}
    for m in methods:
        acc = 0.0
        for q in qs:
            top = max(table[x][q] for x in methods)
            acc += table[m][q] / top if top else 1.0
        out[m] = acc / len(qs) if qs else 0.0
    return out
