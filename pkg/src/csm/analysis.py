"""Candidate-set comparisons between indexing methods."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .algorithms.candidate_index import CandidateIndex
from .algorithms.swap import compose_index_swap  # noqa: F401  (re-exported)
from .algorithms.symbi import dag_edges
from .graph import LabeledGraph
from .query import QueryGraph, bfs_spanning_tree, build_dag, build_spanning_tree, dfs_tree


class NotATreeError(ValueError):
    pass


def _edge_ok(g: LabeledGraph, v: int, w: int, lab: int) -> bool:
    return g.edge_label(v, w) == lab


def baseline_candidates(q: QueryGraph, g: LabeledGraph) -> list[set[int]]:
    """Label filter only: every data vertex carrying the query vertex's label."""
    return [set(g.vertices_with_label(lab)) for lab in q.labels]


def modified_tree_pruning(q: QueryGraph, g: LabeledGraph, root: int = 0) -> list[set[int]]:
    """Label filter, then a bottom-up pass over children, then a top-down pass over parents.

    On a tree query every survivor takes part in some homomorphic match.
    """
    if not q.is_tree():
        raise NotATreeError("modified pruning is defined for tree queries only")
    tree = dfs_tree(q, root)
    cands = baseline_candidates(q, g)
    for u in reversed(tree.order):
        for ch in tree.children[u]:
            lab = q.edge_label(u, ch)
            cands[u] = {v for v in cands[u] if any(_edge_ok(g, v, w, lab) for w in cands[ch])}
    for u in tree.order[1:]:
        p = tree.parent[u]
        lab = q.edge_label(u, p)
        cands[u] = {v for v in cands[u] if any(_edge_ok(g, v, w, lab) for w in cands[p])}
    return cands


@dataclass
class CandidateReport:
    """Per method, the candidate count of every query vertex."""

    query: str
    counts: dict[str, list[int]] = field(default_factory=dict)
    implicit: dict[str, list[int]] = field(default_factory=dict)

    def total(self, method: str) -> int:
        return sum(self.counts[method])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["query_id", "method", "vertex", "candidates", "implicit"])
        for method, row in self.counts.items():
            imp = self.implicit.get(method)
            for u, n in enumerate(row):
                w.writerow([self.query, method, u, n, "" if imp is None else imp[u]])
        return buf.getvalue()


def index_candidates(q: QueryGraph, g: LabeledGraph, method: str, root: int | None = None,
                     tf_from_dag: bool = False) -> CandidateIndex:
    """Build the candidate index a strategy would use.

    ``root`` forces a shared root.  With ``tf_from_dag`` the spanning tree is
    the breadth-first tree of the DAG, so every tree path is a DAG path.
    """
    if method == "sym":
        return CandidateIndex(q, g, dag_edges(build_dag(q, root)), forward=True)
    if method == "tf":
        if tf_from_dag:
            tree = bfs_spanning_tree(q, build_dag(q, root).root)
        else:
            tree = build_spanning_tree(q, g, root)
        return CandidateIndex(q, g, sorted(tree.tree_edges), forward=True)
    if method == "dyn":
        tree = dfs_tree(q, 0 if root is None else root)
        return CandidateIndex(q, g, sorted(tree.tree_edges), forward=False)
    raise ValueError(f"no candidate index for {method!r}")


def candidate_report(q: QueryGraph, g: LabeledGraph, methods=("base", "dyn", "tf", "sym"),
                     root: int | None = None, tf_from_dag: bool = False) -> CandidateReport:
    rep = CandidateReport(q.name)
    for m in methods:
        if m == "base":
            rep.counts[m] = [len(s) for s in baseline_candidates(q, g)]
            continue
        if m == "dyn" and not q.is_tree():
            continue
        idx = index_candidates(q, g, m, root, tf_from_dag)
        rep.counts[m] = [len(s) for s in idx.c]
        rep.implicit[m] = [len(s) for s in idx.implicit_sets()]
    return rep
