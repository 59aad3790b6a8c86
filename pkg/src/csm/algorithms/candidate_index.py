"""Incrementally maintained candidate sets over a directed query structure.

The query edges taken into account (the *universe*) are directed from the
earlier to the later endpoint of a fixed vertex order.  For each query vertex
``u`` two sets are kept:

* ``im[u]`` holds ``v`` when ``L(v) = L(u)`` and, for every parent ``p`` of
  ``u``, ``v`` has a neighbor in ``im[p]`` over an edge with the right label.
* ``c[u]`` holds ``v`` when ``v`` is in ``im[u]`` and, for every child ``ch``,
  ``v`` has a neighbor in ``c[ch]``.

With a spanning tree as universe this is the DCG index, with the whole BFS DAG
the DCS index, and with the ``forward`` pass disabled (``im[u]`` is then every
vertex of the right label) it is the backward-only index.

Two counter tables make every membership test O(1):

* ``mb[u][v][i]`` = number of neighbors of ``v`` in ``im[parents[u][i]]``
* ``mf[u][v][j]`` = number of neighbors of ``v`` in ``c[children[u][j]]``

Only entries with at least one nonzero count are stored; ``mb_nz`` and
``mf_nz`` hold how many counts of an entry are nonzero.
"""

from __future__ import annotations

from collections import deque

from ..graph import LabeledGraph
from ..query import QueryGraph

IM_ADD, C_ADD, IM_DEL, C_DEL = range(4)


class CandidateIndex:
    def __init__(self, q: QueryGraph, g: LabeledGraph, edges: list[tuple[int, int]],
                 forward: bool = True):
        """``edges`` lists the universe as (parent, child) query vertex pairs."""
        self.q = q
        self.g = g
        self.forward = forward
        self.edges = list(edges)
        n = q.n
        self.parents: list[list[tuple[int, int]]] = [[] for _ in range(n)]   # (p, label)
        self.children: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (ch, label)
        for p, ch in edges:
            lab = q.edge_label(p, ch)
            self.parents[ch].append((p, lab))
            self.children[p].append((ch, lab))
        # down[p]: (child, label, slot of p among child's parents)
        self.down = [[(ch, lab, [x for x, _ in self.parents[ch]].index(p))
                      for ch, lab in self.children[p]] for p in range(n)]
        # up[ch]: (parent, label, slot of ch among parent's children)
        self.up = [[(p, lab, [x for x, _ in self.children[p]].index(ch))
                    for p, lab in self.parents[ch]] for ch in range(n)]
        self.by_label: dict[int, list[tuple[int, int, int, int]]] = {}
        for p in range(n):
            for cslot, (ch, lab) in enumerate(self.children[p]):
                pslot = [x for x, _ in self.parents[ch]].index(p)
                self.by_label.setdefault(lab, []).append((p, ch, pslot, cslot))
        self.npar = [len(r) for r in self.parents]
        self.nchi = [len(r) for r in self.children]
        self.im: list[set[int]] = [set() for _ in range(n)]
        self.c: list[set[int]] = [set() for _ in range(n)]
        self.mb: list[dict[int, list[int]]] = [{} for _ in range(n)]
        self.mb_nz: list[dict[int, int]] = [{} for _ in range(n)]
        self.mf: list[dict[int, list[int]]] = [{} for _ in range(n)]
        self.mf_nz: list[dict[int, int]] = [{} for _ in range(n)]
        self._queue: deque = deque()
        self.build()

    # -- membership tests -------------------------------------------------------------

    def in_im(self, u: int, v: int) -> bool:
        if self.forward:
            return v in self.im[u]
        return self.g.labels[v] == self.q.labels[u]

    def _im_ok(self, u: int, v: int) -> bool:
        if self.g.labels[v] != self.q.labels[u]:
            return False
        return self.mb_nz[u].get(v, 0) == self.npar[u]

    def _c_ok(self, u: int, v: int) -> bool:
        return self.in_im(u, v) and self.mf_nz[u].get(v, 0) == self.nchi[u]

    # -- counter updates ----------------------------------------------------------------

    def _bump(self, table, nz, slots: int, u: int, v: int, slot: int, delta: int) -> bool:
        """Adjust one count; return True when it crossed zero."""
        row = table[u].get(v)
        if row is None:
            row = [0] * slots
            table[u][v] = row
        old = row[slot]
        row[slot] = old + delta
        if old == 0 and delta > 0:
            nz[u][v] = nz[u].get(v, 0) + 1
            return True
        if old + delta == 0:
            left = nz[u][v] - 1
            if left:
                nz[u][v] = left
            else:
                del nz[u][v]
                del table[u][v]
            return True
        return False

    def _spread(self, w: int, u: int, delta: int) -> None:
        """``w`` entered (delta=+1) or left (delta=-1) ``im[u]``: update children's ``mb``."""
        g = self.g
        gl = g.labels
        ql = self.q.labels
        adj, adjl = g.adj[w], g.adj_labels[w]
        queue = self._queue
        for ch, lab, slot in self.down[u]:
            want = ql[ch]
            npar = self.npar[ch]
            for v, el in zip(adj, adjl):
                if el != lab or gl[v] != want:
                    continue
                if self._bump(self.mb, self.mb_nz, npar, ch, v, slot, delta):
                    queue.append((IM_ADD if delta > 0 else IM_DEL, ch, v))

    def _gather(self, w: int, u: int, delta: int) -> None:
        """``w`` entered or left ``c[u]``: update parents' ``mf``."""
        g = self.g
        gl = g.labels
        ql = self.q.labels
        adj, adjl = g.adj[w], g.adj_labels[w]
        queue = self._queue
        for p, lab, slot in self.up[u]:
            want = ql[p]
            nchi = self.nchi[p]
            for v, el in zip(adj, adjl):
                if el != lab or gl[v] != want:
                    continue
                if self._bump(self.mf, self.mf_nz, nchi, p, v, slot, delta):
                    queue.append((C_ADD if delta > 0 else C_DEL, p, v))

    # -- propagation ------------------------------------------------------------------------

    def _drain(self) -> None:
        queue = self._queue
        while queue:
            kind, u, v = queue.popleft()
            if kind == IM_ADD:
                if v in self.im[u] or not self._im_ok(u, v):
                    continue
                self.im[u].add(v)
                self._spread(v, u, +1)
                queue.append((C_ADD, u, v))
            elif kind == C_ADD:
                if v in self.c[u] or not self._c_ok(u, v):
                    continue
                self.c[u].add(v)
                self._gather(v, u, +1)
            elif kind == IM_DEL:
                if v not in self.im[u] or self._im_ok(u, v):
                    continue
                self.im[u].discard(v)
                self._spread(v, u, -1)
                queue.append((C_DEL, u, v))
            else:
                if v not in self.c[u] or self._c_ok(u, v):
                    continue
                self.c[u].discard(v)
                self._gather(v, u, -1)

    def _seed_vertex(self, u: int, v: int) -> None:
        if self.forward:
            if not self.npar[u]:
                self._queue.append((IM_ADD, u, v))
        elif not self.nchi[u]:
            self._queue.append((C_ADD, u, v))

    def build(self) -> None:
        g, q = self.g, self.q
        for u in range(q.n):
            for v in sorted(g.vertices_with_label(q.labels[u])):
                self._seed_vertex(u, v)
        self._drain()

    # -- updates ------------------------------------------------------------------------------

    def _edge_changed(self, a: int, b: int, label: int, delta: int) -> None:
        """Count the edge (a, b) for memberships that exist right now."""
        gl = self.g.labels
        ql = self.q.labels
        queue = self._queue
        add = delta > 0
        for p, ch, pslot, cslot in self.by_label.get(label, ()):
            for x, y in ((a, b), (b, a)):
                if gl[x] != ql[p] or gl[y] != ql[ch]:
                    continue
                if self.forward and x in self.im[p]:
                    if self._bump(self.mb, self.mb_nz, self.npar[ch], ch, y, pslot, delta):
                        queue.append((IM_ADD if add else IM_DEL, ch, y))
                if y in self.c[ch]:
                    if self._bump(self.mf, self.mf_nz, self.nchi[p], p, x, cslot, delta):
                        queue.append((C_ADD if add else C_DEL, p, x))

    def insert_edges(self, edges: list[tuple[int, int, int]]) -> None:
        """The edges are already in the graph."""
        for a, b, lab in edges:
            self._edge_changed(a, b, lab, +1)
        self._drain()

    def delete_edges(self, edges: list[tuple[int, int, int]]) -> None:
        """The edges are already gone from the graph."""
        for a, b, lab in edges:
            self._edge_changed(a, b, lab, -1)
        self._drain()

    def add_vertex(self, v: int) -> None:
        lab = self.g.labels[v]
        for u in range(self.q.n):
            if self.q.labels[u] == lab:
                self._seed_vertex(u, v)
        self._drain()

    def remove_vertex(self, v: int) -> None:
        """Forget an isolated vertex."""
        for u in range(self.q.n):
            self.im[u].discard(v)
            self.c[u].discard(v)
            for t in (self.mb, self.mb_nz, self.mf, self.mf_nz):
                t[u].pop(v, None)

    # -- inspection ------------------------------------------------------------------------------

    def implicit_sets(self) -> list[set[int]]:
        if self.forward:
            return self.im
        return [set(self.g.vertices_with_label(lab)) for lab in self.q.labels]

    def snapshot(self) -> dict:
        return {
            "im": [frozenset(s) for s in self.implicit_sets()],
            "c": [frozenset(s) for s in self.c],
            "mb": [{v: tuple(r) for v, r in t.items()} for t in self.mb],
            "mf": [{v: tuple(r) for v, r in t.items()} for t in self.mf],
            "mb_nz": [dict(t) for t in self.mb_nz],
            "mf_nz": [dict(t) for t in self.mf_nz],
            "edges": frozenset(self.candidate_edges()),
        }

    def candidate_edges(self) -> set[tuple[int, int, int, int]]:
        """(parent, child, v_parent, v_child) pairs joining candidates along the universe."""
        out = set()
        g = self.g
        for p in range(self.q.n):
            for ch, lab in self.children[p]:
                cs = self.c[ch]
                for v in self.c[p]:
                    for w, el in zip(g.adj[v], g.adj_labels[v]):
                        if el == lab and w in cs:
                            out.add((p, ch, v, w))
        return out


def naive_fixpoint(q: QueryGraph, g: LabeledGraph, edges: list[tuple[int, int]],
                   order: list[int], forward: bool = True) -> tuple[list[set[int]], list[set[int]]]:
    """Two plain passes over ``order`` (a topological order of the universe)."""
    parents = {u: [] for u in range(q.n)}
    children = {u: [] for u in range(q.n)}
    for p, ch in edges:
        parents[ch].append(p)
        children[p].append(ch)
    im = [set() for _ in range(q.n)]
    for u in order:
        for v in g.vertices():
            if g.labels[v] != q.labels[u]:
                continue
            if not forward or all(any(g.edge_label(v, w) == q.edge_label(u, p) for w in im[p])
                                  for p in parents[u]):
                im[u].add(v)
    c = [set() for _ in range(q.n)]
    for u in reversed(order):
        for v in im[u]:
            if all(any(g.edge_label(v, w) == q.edge_label(u, ch) for w in c[ch]) for ch in children[u]):
                c[u].add(v)
    return im, c
