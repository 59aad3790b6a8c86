"""DAG candidate index over every query edge, with per-match dynamic ordering."""

from __future__ import annotations

from ..enumeration import CandidateView, enumerate_dynamic
from ..framework import Capabilities, CsmStrategy
from ..query import QueryDag, build_dag
from .candidate_index import CandidateIndex


def dag_edges(dag: QueryDag) -> list[tuple[int, int]]:
    return [(p, ch) for p in dag.order for ch in dag.children[p]]


class SymBi(CsmStrategy):
    name = "sym"
    caps = Capabilities(batch=False)

    def __init__(self, root: int | None = None):
        super().__init__()
        self.root = root

    def generate_initial_order(self):
        self.dag = build_dag(self.q, self.root)

    def build_initial_index(self):
        self.index = CandidateIndex(self.q, self.g, dag_edges(self.dag), forward=True)
        self.view = CandidateView(self.q, self.g, self.index.c)

    def update_index(self, updates, sign):
        edges = [(u.src, u.dst, u.label) for u in updates]
        if sign == "+":
            self.index.insert_edges(edges)
        else:
            self.index.delete_edges(edges)

    def on_vertex_added(self, v):
        self.index.add_vertex(v)

    def on_vertex_removed(self, v, label):
        self.index.remove_vertex(v)

    def enumerate_seed(self, k, vx, vy, exclusions, counters, sink):
        x, y, _ = self.q.edges[k]
        enumerate_dynamic(self.q, self.view, {x: vx, y: vy}, self.cfg, counters, exclusions, sink)

    def candidate_sets(self):
        return self.index.c

    def snapshot(self):
        return self.index.snapshot()
