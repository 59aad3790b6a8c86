"""Shared fixtures and randomized instance generators for the test suite."""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from csm.algorithms.candidate_index import CandidateIndex
from csm.framework import run_stream
from csm.graph import DELETE, INSERT, EdgeUpdate, LabeledGraph, UpdateStream, load_graph, load_stream
from csm.oracle import oracle_matches
from csm.query import QueryGraph, load_query

DATA = Path(__file__).parent / "data"

EXAMPLE_POSITIVE = (2, 6, 5, 10)
EXAMPLE_NEGATIVE = (0, 4, 5, 8)


def load_example():
    """The 12-vertex example graph, the 4-cycle query and the two-update stream."""
    return (load_graph(DATA / "example_graph.txt"), load_query(DATA / "example_query.txt"),
            load_stream(DATA / "example_stream.txt"))


def example_tree_query() -> QueryGraph:
    return load_query(DATA / "example_tree_query.txt")


# -- random inputs -------------------------------------------------------------------------


def random_query(rng: random.Random, n: int, vlabels: int, elabels: int = 1,
                 shape: str = "tree") -> QueryGraph:
    """Connected query: a random tree plus extra edges for ``sparse`` / ``dense``."""
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.add((j, i))
    if shape != "tree" and n >= 3:
        others = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in edges]
        rng.shuffle(others)
        extra = 1 if shape == "sparse" else max(2, len(others) // 2)
        edges.update(others[:extra])
    labels = [rng.randrange(vlabels) for _ in range(n)]
    return QueryGraph(labels, [(a, b, rng.randrange(elabels)) for a, b in sorted(edges)],
                      f"{shape}{n}")


def random_data_graph(rng: random.Random, n: int, m: int, vlabels: int,
                      elabels: int = 1) -> LabeledGraph:
    g = LabeledGraph()
    for _ in range(n):
        g.add_vertex(rng.randrange(vlabels))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for a, b in rng.sample(pairs, min(m, len(pairs))):
        g.insert_edge(a, b, rng.randrange(elabels))
    return g


def random_stream(rng: random.Random, g: LabeledGraph, ops: int, elabels: int = 1,
                  max_batch: int = 1, p_insert: float = 0.5) -> UpdateStream:
    """Valid mixed stream over the vertices of ``g`` (which is left untouched)."""
    work = g.copy()
    n = g.capacity
    batches = []
    left = ops
    while left > 0:
        size = min(left, rng.randint(1, max_batch))
        left -= size
        batch = []
        touched = set()
        for _ in range(size):
            if rng.random() < p_insert or work.edge_count == 0:
                for _ in range(20):
                    a, b = rng.sample(range(n), 2)
                    key = (min(a, b), max(a, b))
                    if not work.has_edge(a, b) and key not in touched:
                        break
                else:
                    continue
                lab = rng.randrange(elabels)
                work.insert_edge(a, b, lab)
                batch.append(EdgeUpdate(INSERT, a, b, lab))
            else:
                cand = [e for e in work.edges() if (e[0], e[1]) not in touched]
                if not cand:
                    continue
                a, b, lab = rng.choice(cand)
                work.delete_edge(a, b)
                batch.append(EdgeUpdate(DELETE, a, b, lab))
                key = (a, b)
            touched.add(key)
        if batch:
            batches.append(batch)
    return UpdateStream(batches)


def insert_only(stream: UpdateStream) -> UpdateStream:
    return UpdateStream([[u for u in b if u.op == INSERT] for b in stream
                         if any(u.op == INSERT for u in b)])


@dataclass
class Instance:
    q: QueryGraph
    g: LabeledGraph
    stream: UpdateStream
    insert_stream: UpdateStream
    seed: int


def random_instance(seed: int, max_q: int = 6, max_g: int = 30, max_labels: int = 4,
                    max_ops: int = 50, max_batch: int = 4) -> Instance:
    """Mixed-stream instance within the sizes used by the randomized equivalence checks."""
    rng = random.Random(seed)
    shape = rng.choice(["tree", "sparse", "dense"])
    nq = rng.randint(2 if shape == "tree" else 3, max_q)
    vlabels = rng.randint(1, max_labels)
    elabels = rng.randint(1, 2)
    n = rng.randint(max(nq, 6), max_g)
    g = random_data_graph(rng, n, rng.randint(n, 2 * n), vlabels, elabels)
    q = random_query(rng, nq, vlabels, elabels, shape)
    stream = random_stream(rng, g, rng.randint(1, max_ops), elabels, max_batch)
    # insert-only stream for strategies that cannot delete: fresh edges on top of g
    ins = random_stream(rng, g, rng.randint(1, max_ops // 2 or 1), elabels, max_batch,
                        p_insert=1.0)
    return Instance(q, g, stream, ins, seed)


# -- checking against the oracle -----------------------------------------------------------


class OracleCache:
    """Oracle match sets keyed by graph content, so replays of one stream share work."""

    def __init__(self, q: QueryGraph, semantics: str):
        self.q = q
        self.semantics = semantics
        self._memo: dict[frozenset, set] = {}

    def matches(self, g: LabeledGraph) -> set:
        key = frozenset(g.edges())
        hit = self._memo.get(key)
        if hit is None:
            hit = oracle_matches(self.q, g, self.semantics)
            self._memo[key] = hit
        return hit


@dataclass
class ReplayReport:
    mismatches: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)       # ΔQ_k sets sharing a match
    rebuild_failures: list = field(default_factory=list)
    multi_edge_steps: int = 0
    steps: int = 0
    rebuild_seconds: float = 0.0     # time spent on from-scratch comparisons
    outcome: object = None

    @property
    def ok(self) -> bool:
        return not (self.mismatches or self.overlaps or self.rebuild_failures)


def replay(q: QueryGraph, g: LabeledGraph, stream: UpdateStream, strategy, semantics: str,
           cache: OracleCache, check_rebuild: bool = False) -> ReplayReport:
    """Run ``strategy`` and compare every step with the oracle difference.

    With ``check_rebuild`` the strategy's maintained index is compared after
    each step with one built from scratch on the current graph.
    """
    rep = ReplayReport()
    shadow = g.copy()
    work = g.copy()

    def on_step(res):
        before = cache.matches(shadow)
        for u in res.updates:
            shadow.apply(u)
        after = cache.matches(shadow)
        expected = after - before if res.sign == INSERT else before - after
        got = Counter(res.matches)
        rep.steps += 1
        if got != Counter(expected):
            rep.mismatches.append((res.sign, res.updates, sorted(got), sorted(expected)))
        if len(res.updates) > 1:
            rep.multi_edge_steps += 1
            parts = list(res.by_edge.values())
            seen = set()
            for part in parts:
                if seen & set(part):
                    rep.overlaps.append((res.updates, res.by_edge))
                seen |= set(part)
        if check_rebuild:
            t0 = time.perf_counter()
            idx = strategy.index
            fresh = CandidateIndex(q, work, idx.edges, idx.forward)
            if fresh.snapshot() != idx.snapshot():
                rep.rebuild_failures.append(res.updates)
            rep.rebuild_seconds += time.perf_counter() - t0

    rep.outcome = run_stream(q, work, stream, strategy, semantics, collect=True, on_step=on_step)
    return rep
