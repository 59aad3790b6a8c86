"""Spanning-tree candidate index with implicit and explicit candidate sets.

Only tree edges feed the index; non-tree query edges are checked against the
data graph during enumeration.  Matching orders are fixed offline: a base order
from repeatedly removing the leaf whose root path has the fewest embeddings,
and per query edge an order that starts at the edge and climbs to the root.
"""

from __future__ import annotations

from ..enumeration import CandidateView, MatchingOrder, enumerate_matches
from ..framework import Capabilities, CsmStrategy
from ..query import QueryGraph, SpanningTree, build_spanning_tree
from .candidate_index import CandidateIndex


def path_match_counts(q: QueryGraph, tree: SpanningTree, index: CandidateIndex) -> dict[int, int]:
    """Number of embeddings of the root path ``P_u`` over the candidate sets, per ``u``."""
    g = index.g
    per_vertex: dict[int, dict[int, int]] = {tree.root: {v: 1 for v in index.c[tree.root]}}
    totals = {tree.root: len(index.c[tree.root])}
    for u in tree.order[1:]:
        p = tree.parent[u]
        lab = q.edge_label(p, u)
        up = per_vertex[p]
        row: dict[int, int] = {}
        for v in index.c[u]:
            s = 0
            for w, el in zip(g.adj[v], g.adj_labels[v]):
                if el == lab:
                    s += up.get(w, 0)
            if s:
                row[v] = s
        per_vertex[u] = row
        totals[u] = sum(row.values())
    return totals


def leaf_deletion_order(tree: SpanningTree, counts: dict[int, int]) -> list[int]:
    """Repeatedly drop the leaf with the fewest path embeddings; return the reverse."""
    alive_children = {u: len(tree.children[u]) for u in tree.order}
    leaves = {u for u in tree.order if alive_children[u] == 0 and u != tree.root}
    removed = []
    while leaves:
        u = min(leaves, key=lambda x: (counts[x], x))
        leaves.discard(u)
        removed.append(u)
        p = tree.parent[u]
        alive_children[p] -= 1
        if alive_children[p] == 0 and p != tree.root:
            leaves.add(p)
    removed.append(tree.root)
    removed.reverse()
    return removed


def edge_order(q: QueryGraph, tree: SpanningTree, base: list[int], x: int, y: int) -> list[int]:
    """``x``, ``y``, the ancestors of ``x`` up to the root, then the rest in ``base`` order."""
    out = [x, y]
    placed = {x, y}
    u = tree.parent[x]
    while u is not None:
        if u not in placed:
            out.append(u)
            placed.add(u)
        u = tree.parent[u]
    out += [u for u in base if u not in placed]
    return out


def tf_orders(q: QueryGraph, tree: SpanningTree, index: CandidateIndex
              ) -> tuple[list[int], dict[int, MatchingOrder]]:
    """Base order and one order per query edge, started at its endpoint earlier in DFS order."""
    base = leaf_deletion_order(tree, path_match_counts(q, tree, index))
    pos = {u: i for i, u in enumerate(tree.order)}
    catalog = {}
    for k, (a, b, _) in enumerate(q.edges):
        x, y = (a, b) if pos[a] < pos[b] else (b, a)
        catalog[k] = MatchingOrder(q, edge_order(q, tree, base, x, y))
    return base, catalog


class TurboFlux(CsmStrategy):
    name = "tf"
    caps = Capabilities(batch=False)

    def __init__(self, root: int | None = None, tree: SpanningTree | None = None):
        super().__init__()
        self.root = root
        self.fixed_tree = tree

    def generate_initial_order(self):
        self.tree = self.fixed_tree or build_spanning_tree(self.q, self.g, self.root)

    def build_initial_index(self):
        self.index = CandidateIndex(self.q, self.g, sorted(self.tree.tree_edges), forward=True)
        self.base_order, self.catalog = tf_orders(self.q, self.tree, self.index)
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
        enumerate_matches(self.q, self.catalog[k], self.view, {x: vx, y: vy},
                          self.cfg, counters, exclusions, sink)

    def candidate_sets(self):
        return self.index.c

    def snapshot(self):
        return self.index.snapshot()
