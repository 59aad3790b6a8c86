"""Tree queries with a backward-only candidate index and a per-update local index.

The global index keeps ``C(u)``: vertices that root an embedding of the
subtree below ``u``.  For an updated data edge bound to tree edge ``(p, c)``
the local index pins ``c`` and ``p`` to the edge's endpoints, keeps ``C(u)``
for every vertex off the path from ``p`` to the root, and recomputes the sets
on that path bottom-up.  Edges excluded for later query edges are removed
from the counts first (with the cascade that follows), so every candidate of
the local index still has a usable neighbor for each child.  Enumerating top
down along the depth-first order then never meets an empty candidate set
under homomorphism.
"""

from __future__ import annotations

from ..enumeration import CandidateView, MatchingOrder, _edge_key, enumerate_matches
from ..framework import Capabilities, CsmStrategy
from ..query import QueryGraph, SpanningTree, dfs_tree
from .candidate_index import CandidateIndex


class _Overlay:
    """``C(u)`` minus the vertices knocked out by exclusions."""

    __slots__ = ("base", "removed")

    def __init__(self, base: set[int], removed: set[int]):
        self.base = base
        self.removed = removed

    def __contains__(self, v):
        return v in self.base and v not in self.removed

    def __iter__(self):
        return (v for v in self.base if v not in self.removed)

    def __len__(self):
        return sum(1 for _ in self)


class LocalIndex:
    """Candidate sets restricted to matches that bind edge ``k`` to one data edge."""

    def __init__(self, owner: "IEDyn", k: int, vx: int, vy: int, exclusions: dict):
        q, tree, index = owner.q, owner.tree, owner.index
        g = index.g
        x, y, _ = q.edges[k]
        if tree.parent.get(y) == x:
            p, c, vp, vc = x, y, vx, vy
        else:
            p, c, vp, vc = y, x, vy, vx
        self.pinned = (p, c, vp, vc)
        removed = self._exclusion_cascade(q, tree, index, exclusions)
        sets: list = [_Overlay(index.c[u], removed[u]) for u in range(q.n)]
        self.path = tree.path(p)
        sets[c] = {vc} if vc in sets[c] else set()
        sets[p] = {vp} if (vp in sets[p] and sets[c]) else set()
        below = p
        for a in reversed(self.path[:-1]):
            lab = q.edge_label(a, below)
            ex = exclusions.get(q.edge_index(a, below))
            want = q.labels[a]
            cur = set()
            for w in sets[below]:
                for v, el in zip(g.adj[w], g.adj_labels[w]):
                    if el == lab and g.labels[v] == want and v in sets[a] \
                            and (ex is None or _edge_key(v, w) not in ex):
                        cur.add(v)
            sets[a] = cur
            below = a
        self.sets = sets

    @staticmethod
    def _exclusion_cascade(q: QueryGraph, tree: SpanningTree, index: CandidateIndex,
                           exclusions: dict) -> list[set[int]]:
        removed: list[set[int]] = [set() for _ in range(q.n)]
        if not exclusions:
            return removed
        g = index.g
        dec: dict[tuple[int, int], list[int]] = {}
        work = []

        def knock(p, v, slot):
            row = dec.setdefault((p, v), [0] * index.nchi[p])
            row[slot] += 1
            if row[slot] == index.mf[p].get(v, [0] * index.nchi[p])[slot] \
                    and v in index.c[p] and v not in removed[p]:
                removed[p].add(v)
                work.append((p, v))

        slot_of = {}
        for p in range(q.n):
            for j, (ch, _) in enumerate(index.children[p]):
                slot_of[(p, ch)] = j
        for i, keys in exclusions.items():
            a, b, _ = q.edges[i]
            p, c = (a, b) if tree.parent.get(b) == a else (b, a)
            for s, t in keys:
                for vp, vc in ((s, t), (t, s)):
                    if g.labels[vp] == q.labels[p] and vc in index.c[c]:
                        knock(p, vp, slot_of[(p, c)])
        while work:
            c, w = work.pop()
            for p, lab, slot in index.up[c]:
                ex = exclusions.get(q.edge_index(p, c))
                for v, el in zip(g.adj[w], g.adj_labels[w]):
                    if el != lab or g.labels[v] != q.labels[p]:
                        continue
                    if ex is not None and _edge_key(v, w) in ex:
                        continue        # already discounted
                    knock(p, v, slot)
        return removed


class IEDyn(CsmStrategy):
    name = "dyn"
    caps = Capabilities(batch=True, cyclic_queries=False)

    def __init__(self, root: int | None = None):
        super().__init__()
        self.root = root

    def generate_initial_order(self):
        root = 0 if self.root is None else self.root
        self.tree = dfs_tree(self.q, root)
        self.order = MatchingOrder(self.q, self.tree.order)

    def build_initial_index(self):
        self.index = CandidateIndex(self.q, self.g, sorted(self.tree.tree_edges), forward=False)

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

    def local_index(self, k: int, vx: int, vy: int, exclusions: dict | None = None) -> LocalIndex:
        return LocalIndex(self, k, vx, vy, exclusions or {})

    def enumerate_seed(self, k, vx, vy, exclusions, counters, sink):
        local = self.local_index(k, vx, vy, exclusions)
        if not local.sets[self.tree.root]:
            return
        view = CandidateView(self.q, self.g, local.sets)
        enumerate_matches(self.q, self.order, view, None, self.cfg, counters, exclusions, sink)

    def candidate_sets(self):
        return self.index.c

    def snapshot(self):
        return self.index.snapshot()
