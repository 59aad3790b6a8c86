"""Left-deep join tree caching every partial result; insertions only.

Leaf ``j`` stores the data edges matching the ``j``-th edge of the join order.
Prefix table ``P_j`` stores the join of leaves ``0..j``; ``P_{n-1}`` holds
the full matches.  Every table is hashed on the attributes it shares with the
table it is joined against next, so a new tuple only probes one bucket.
"""

from __future__ import annotations

from ..enumeration import Counters
from ..framework import Capabilities, CsmStrategy, attribute_edge
from ..enumeration import _edge_key
from ..query import QueryGraph, relation_sizes

DEFAULT_MEMORY_CAP = 10_000_000


class IndexMemoryExceeded(MemoryError):
    """The cached partial results grew past the configured cap."""


def sj_edge_order(q: QueryGraph, g) -> list[int]:
    """Greedy: the connected edge with the smallest relation next; ties by index."""
    sizes = relation_sizes(q, g)
    order: list[int] = []
    placed: set[int] = set()
    left = set(range(q.edge_count))
    while left:
        options = [k for k in left
                   if not order or q.edges[k][0] in placed or q.edges[k][1] in placed]
        k = min(options, key=lambda i: (sizes[i], i))
        order.append(k)
        left.discard(k)
        placed.update(q.edges[k][:2])
    return order


class _Table:
    """Tuples over a schema, bucketed on a key made of some schema positions."""

    def __init__(self, schema: tuple[int, ...], key: tuple[int, ...]):
        self.schema = schema
        self.key_pos = tuple(schema.index(a) for a in key)
        self.rows: set[tuple] = set()
        self.buckets: dict[tuple, list[tuple]] = {}

    def add(self, t: tuple) -> bool:
        if t in self.rows:
            return False
        self.rows.add(t)
        self.buckets.setdefault(tuple(t[i] for i in self.key_pos), []).append(t)
        return True

    def probe(self, key: tuple) -> list[tuple]:
        return self.buckets.get(key, [])

    def __len__(self):
        return len(self.rows)


class SJTree(CsmStrategy):
    name = "sj"
    caps = Capabilities(edge_delete=False, vertex_delete=False, label_update=False,
                        batch=False, early_termination=False)

    def __init__(self, memory_cap: int = DEFAULT_MEMORY_CAP):
        super().__init__()
        self.memory_cap = memory_cap
        self.cached = 0
        self.peak_cached = 0

    def generate_initial_order(self):
        q = self.q
        self.edge_order = sj_edge_order(q, self.g)
        n = len(self.edge_order)
        self.leaf_schema = [tuple(q.edges[k][:2]) for k in self.edge_order]
        self.prefix_schema = []
        schema: tuple[int, ...] = ()
        for j in range(n):
            schema = schema + tuple(a for a in self.leaf_schema[j] if a not in schema)
            self.prefix_schema.append(schema)
        # shared attributes between P_{j-1} and leaf j, ordered by query vertex id
        self.join_key = [()] + [tuple(sorted(set(self.prefix_schema[j - 1]) & set(self.leaf_schema[j])))
                                for j in range(1, n)]

    def build_initial_index(self):
        q, g = self.q, self.g
        n = len(self.edge_order)
        self.leaves = [_Table(self.leaf_schema[j], self.join_key[j]) for j in range(n)]
        self.prefix = [_Table(self.prefix_schema[j], self.join_key[j + 1] if j + 1 < n else ())
                       for j in range(n)]
        for a, b, lab in g.edges():
            for j in range(n):
                for t in self._leaf_tuples(j, a, b, lab):
                    self._store(self.leaves[j], t)
        for t in self.leaves[0].rows:
            self._store(self.prefix[0], t)
        for j in range(1, n):
            for t in list(self.prefix[j - 1].rows):
                for r in self._extend(j, t):
                    self._store(self.prefix[j], r)

    # -- helpers -------------------------------------------------------------------------

    def _leaf_tuples(self, j: int, a: int, b: int, lab: int) -> list[tuple[int, int]]:
        x, y, el = self.q.edges[self.edge_order[j]]
        if el != lab:
            return []
        gl, ql = self.g.labels, self.q.labels
        out = []
        if gl[a] == ql[x] and gl[b] == ql[y]:
            out.append((a, b))
        if gl[b] == ql[x] and gl[a] == ql[y]:
            out.append((b, a))
        return out

    def _store(self, table: _Table, t: tuple) -> bool:
        if not table.add(t):
            return False
        self.cached += 1
        self.peak_cached = max(self.peak_cached, self.cached)
        if self.cached > self.memory_cap:
            raise IndexMemoryExceeded(f"{self.cached} cached tuples exceed the cap of {self.memory_cap}")
        return True

    def _combine(self, j: int, t: tuple, r: tuple) -> tuple | None:
        """Join prefix tuple ``t`` (schema P_{j-1}) with leaf tuple ``r`` of leaf ``j``."""
        ps = self.prefix_schema[j - 1]
        out = list(t)
        for attr, v in zip(self.leaf_schema[j], r):
            if attr in ps:
                if t[ps.index(attr)] != v:
                    return None
            else:
                out.append(v)
        if self.cfg.injective and len(set(out)) != len(out):
            return None
        return tuple(out)

    def _key_of(self, schema, key, t):
        return tuple(t[schema.index(a)] for a in key)

    def _extend(self, j: int, t: tuple) -> list[tuple]:
        key = self._key_of(self.prefix_schema[j - 1], self.join_key[j], t)
        out = []
        for r in self.leaves[j].probe(key):
            c = self._combine(j, t, r)
            if c is not None:
                out.append(c)
        return out

    def _lift(self, j: int, delta: list[tuple]) -> list[tuple]:
        """Store ``delta`` in P_j and push it up to the root; return new root tuples."""
        n = len(self.edge_order)
        while True:
            delta = [t for t in delta if self._store(self.prefix[j], t)]
            if j == n - 1 or not delta:
                return delta if j == n - 1 else []
            j += 1
            delta = [c for t in delta for c in self._extend(j, t)]

    def _insert_leaf_tuple(self, j: int, r: tuple) -> list[tuple]:
        if not self._store(self.leaves[j], r):
            return []
        if j == 0:
            return self._lift(0, [r])
        key = self._key_of(self.leaf_schema[j], self.join_key[j], r)
        prev = self.prefix[j - 1]
        delta = []
        for t in prev.probe(key):
            c = self._combine(j, t, r)
            if c is not None:
                delta.append(c)
        return self._lift(j, delta)

    # -- framework hooks -------------------------------------------------------------------

    def update_index(self, updates, sign):
        """Index maintenance happens while enumerating: the join produces the results."""

    def delta_enumerate(self, plan, counters: Counters, sink):
        if plan.sign != "+":
            raise ValueError("SJ-Tree supports insertions only")
        q = self.q
        root_schema = self.prefix_schema[-1]
        perm = [root_schema.index(u) for u in range(q.n)]
        for up in plan.updates:
            keys = {_edge_key(up.src, up.dst)}
            for j in range(len(self.edge_order)):
                for r in self._leaf_tuples(j, up.src, up.dst, up.label):
                    for t in self._insert_leaf_tuple(j, r):
                        m = tuple(t[i] for i in perm)
                        counters.results += 1
                        sink(attribute_edge(q, m, keys), m)

    def table_rows(self, j: int) -> set[tuple]:
        return set(self.prefix[j].rows)

    def candidates_total(self):
        return None
