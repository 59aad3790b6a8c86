"""Strategies that pair one algorithm's matching orders with the DAG candidate index."""

from __future__ import annotations

from ..enumeration import CandidateView, MatchingOrder, enumerate_matches
from ..framework import Capabilities, CapabilityError
from ..query import build_spanning_tree, dfs_tree
from .candidate_index import CandidateIndex
from .graphflow import gf_catalog
from .symbi import SymBi
from .turboflux import edge_order, tf_orders

ORDER_SOURCES = ("gf", "tf", "dyn")


def _gf_orders(q, g):
    cat = gf_catalog(q)
    return {k: cat[(k, False)] for k in range(q.edge_count)}


def _tf_orders(q, g):
    tree = build_spanning_tree(q, g)
    index = CandidateIndex(q, g, sorted(tree.tree_edges), forward=True)
    return tf_orders(q, tree, index)[1]


def _dyn_orders(q, g):
    tree = dfs_tree(q, 0)
    pos = {u: i for i, u in enumerate(tree.order)}
    out = {}
    for k, (a, b, _) in enumerate(q.edges):
        x, y = (a, b) if pos[a] < pos[b] else (b, a)
        out[k] = MatchingOrder(q, edge_order(q, tree, tree.order, x, y))
    return out


_BUILDERS = {"gf": _gf_orders, "tf": _tf_orders, "dyn": _dyn_orders}


class IndexSwap(SymBi):
    """Static per-edge orders from ``order_source`` over the DAG candidate sets."""

    def __init__(self, order_source: str, root: int | None = None):
        if order_source not in _BUILDERS:
            raise ValueError(f"unknown order source {order_source!r}")
        super().__init__(root)
        self.order_source = order_source
        self.name = "o-" + order_source
        self.caps = Capabilities(batch=False, cyclic_queries=order_source != "dyn")

    def generate_initial_order(self):
        super().generate_initial_order()
        self.catalog = _BUILDERS[self.order_source](self.q, self.g)

    def enumerate_seed(self, k, vx, vy, exclusions, counters, sink):
        x, y, _ = self.q.edges[k]
        enumerate_matches(self.q, self.catalog[k], self.view, {x: vx, y: vy},
                          self.cfg, counters, exclusions, sink)


def compose_index_swap(order_source: str, index_source: str = "sym") -> IndexSwap:
    if index_source != "sym":
        raise CapabilityError("only the DAG index can host foreign matching orders")
    return IndexSwap(order_source)
