"""Index-free strategy: per query edge, a precomputed greedy order, relations read from G."""

from __future__ import annotations

from ..enumeration import GraphView, MatchingOrder, enumerate_matches
from ..framework import Capabilities, CsmStrategy
from ..query import QueryGraph


def gf_order_for_edge(q: QueryGraph, x: int, y: int) -> list[int]:
    """Start with ``x, y`` and keep adding the vertex with most neighbors already placed.

    Ties go to the larger degree, then to the smaller id.
    """
    order = [x, y]
    placed = {x, y}
    while len(order) < q.n:
        best = None
        for u in range(q.n):
            if u in placed:
                continue
            links = sum(1 for w in q.nbrs[u] if w in placed)
            if not links:
                continue
            key = (-links, -q.degree(u), u)
            if best is None or key < best:
                best = key
        order.append(best[2])
        placed.add(best[2])
    return order


def gf_catalog(q: QueryGraph) -> dict[tuple[int, bool], MatchingOrder]:
    """Orders keyed by (edge index, reversed).  Reversed entries exist only when
    both endpoints carry the same label, since only then can the data edge be
    bound either way round."""
    out = {}
    for k, (x, y, _) in enumerate(q.edges):
        out[(k, False)] = MatchingOrder(q, gf_order_for_edge(q, x, y))
        if q.labels[x] == q.labels[y]:
            out[(k, True)] = MatchingOrder(q, gf_order_for_edge(q, y, x))
    return out


class Graphflow(CsmStrategy):
    name = "gf"
    caps = Capabilities(batch=True)

    def generate_initial_order(self):
        self.catalog = gf_catalog(self.q)
        self.view = GraphView(self.q, self.g)

    def order_for(self, k: int, vx: int, vy: int) -> MatchingOrder:
        flipped = (k, True) in self.catalog and vx > vy
        return self.catalog[(k, flipped)]

    def enumerate_seed(self, k, vx, vy, exclusions, counters, sink):
        x, y, _ = self.q.edges[k]
        enumerate_matches(self.q, self.order_for(k, vx, vy), self.view, {x: vx, y: vy},
                          self.cfg, counters, exclusions, sink)
