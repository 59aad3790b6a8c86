"""Vertex-at-a-time match enumeration shared by every strategy.

A partial match is a list ``M`` indexed by query vertex holding the mapped
data vertex or -1.  Candidates for the next query vertex ``u`` are the
intersection of the extension lists of its already mapped neighbors; the
intersection walks the list of the neighbor with the smallest degree and
binary-searches the adjacency arrays of the others.

Where candidates come from is abstracted by a ``RelationView``: the plain
graph (no index), or a candidate index that only admits some vertices per
query vertex.  Exclusions implement ``R_i - dR_i``: a data edge listed under
query edge ``i`` may not be used to match that edge.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .graph import LabeledGraph
from .query import QueryGraph

HOMOMORPHISM = "homo"
ISOMORPHISM = "iso"
SEMANTICS = (HOMOMORPHISM, ISOMORPHISM)

POLL_INTERVAL = 1024


class BudgetExceeded(Exception):
    """The time budget ran out during a search."""


class LimitReached(Exception):
    """Internal signal: the result limit has been hit."""


class OrderError(ValueError):
    pass


@dataclass
class Counters:
    results: int = 0
    emp: int = 0
    vis: int = 0
    calls: int = 0
    index_time: float = 0.0
    enum_time: float = 0.0

    @property
    def inv(self) -> int:
        return self.emp + self.vis

    def merge(self, other: "Counters") -> None:
        self.results += other.results
        self.emp += other.emp
        self.vis += other.vis
        self.calls += other.calls
        self.index_time += other.index_time
        self.enum_time += other.enum_time


@dataclass
class EnumerationConfig:
    semantics: str = HOMOMORPHISM
    limit: int | None = None            # per-update result limit
    deadline: float | None = None       # absolute time.monotonic() value
    poll_interval: int = POLL_INTERVAL

    def __post_init__(self):
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.limit is not None and self.limit < 1:
            raise ValueError("limit must be at least 1")

    @property
    def injective(self) -> bool:
        return self.semantics == ISOMORPHISM


class MatchingOrder:
    """A connected permutation of the query vertices.

    ``back[i]`` lists ``(u', edge_label, edge_index)`` for the neighbors of
    ``order[i]`` that come earlier in the order.
    """

    def __init__(self, q: QueryGraph, order: Iterable[int]):
        self.order = list(order)
        if sorted(self.order) != list(range(q.n)):
            raise OrderError(f"{self.order} is not a permutation of the query vertices")
        pos = {u: i for i, u in enumerate(self.order)}
        self.position = pos
        self.back: list[list[tuple[int, int, int]]] = []
        self.forward: list[list[int]] = []
        for i, u in enumerate(self.order):
            earlier = [(w, q.edge_label(u, w), q.edge_index(u, w)) for w in q.nbrs[u] if pos[w] < i]
            later = [w for w in q.nbrs[u] if pos[w] > i]
            if i > 0 and not earlier:
                raise OrderError(f"order {self.order} is not connected at {u}")
            self.back.append(earlier)
            self.forward.append(later)

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    def __repr__(self):
        return f"MatchingOrder({self.order})"


def is_connected_order(q: QueryGraph, order: list[int]) -> bool:
    try:
        MatchingOrder(q, order)
    except OrderError:
        return False
    return True


# -- relation views -------------------------------------------------------------------


class GraphView:
    """Relations read straight from the data graph, filtered by labels."""

    def __init__(self, q: QueryGraph, g: LabeledGraph):
        self.q = q
        self.g = g

    def admits(self, u: int, v: int) -> bool:
        return self.g.labels[v] == self.q.labels[u]

    def seed_candidates(self, u: int) -> list[int]:
        return sorted(self.g.vertices_with_label(self.q.labels[u]))

    def extensions(self, u_from: int, v_from: int, u_to: int) -> list[int]:
        lab = self.q.edge_label(u_from, u_to)
        want = self.q.labels[u_to]
        vl = self.g.labels
        return [w for w, el in zip(self.g.adj[v_from], self.g.adj_labels[v_from])
                if el == lab and vl[w] == want]

    def size_hint(self, v: int) -> int:
        return len(self.g.adj[v])


class CandidateView(GraphView):
    """Relations restricted to vertices in per-query-vertex candidate sets."""

    def __init__(self, q: QueryGraph, g: LabeledGraph, cands: list[set[int]]):
        super().__init__(q, g)
        self.cands = cands

    def admits(self, u: int, v: int) -> bool:
        return v in self.cands[u]

    def seed_candidates(self, u: int) -> list[int]:
        return sorted(self.cands[u])

    def extensions(self, u_from: int, v_from: int, u_to: int) -> list[int]:
        lab = self.q.edge_label(u_from, u_to)
        cs = self.cands[u_to]
        return [w for w, el in zip(self.g.adj[v_from], self.g.adj_labels[v_from])
                if el == lab and w in cs]


# -- shared pieces ------------------------------------------------------------------------


def _edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def local_candidates(view, M: list[int], u: int, consulted: list[tuple[int, int, int]],
                     exclusions: dict[int, set] | None = None) -> list[int]:
    """Sorted intersection of the extension lists of the mapped neighbors ``consulted``.

    ``consulted`` holds ``(u', edge_label, edge_index)`` triples with ``u'``
    already mapped in ``M``.
    """
    g = view.g
    if len(consulted) == 1:
        first = consulted[0]
        others = ()
    else:
        first = min(consulted, key=lambda t: view.size_hint(M[t[0]]))
        others = [t for t in consulted if t is not first]
    p, _, k = first
    vp = M[p]
    out = view.extensions(p, vp, u)
    if exclusions and k in exclusions:
        ex = exclusions[k]
        out = [w for w in out if _edge_key(vp, w) not in ex]
    for p2, lab, k2 in others:
        v2 = M[p2]
        ex = exclusions.get(k2) if exclusions else None
        out = [w for w in out if g.edge_label(v2, w) == lab
               and (ex is None or _edge_key(v2, w) not in ex)]
        if not out:
            break
    return out


def seed_consistent(q: QueryGraph, g: LabeledGraph, view, M: list[int],
                    exclusions: dict[int, set] | None, injective: bool) -> bool:
    """Check the query edges and labels among already mapped seed vertices."""
    mapped = [u for u in range(q.n) if M[u] >= 0]
    for u in mapped:
        if not view.admits(u, M[u]):
            return False
    if injective and len({M[u] for u in mapped}) != len(mapped):
        return False
    for k, (a, b, lab) in enumerate(q.edges):
        if M[a] >= 0 and M[b] >= 0:
            if g.edge_label(M[a], M[b]) != lab:
                return False
            if exclusions and k in exclusions and _edge_key(M[a], M[b]) in exclusions[k]:
                return False
    return True


class _Search:
    """State of one enumeration call."""

    def __init__(self, q, view, cfg: EnumerationConfig, counters: Counters,
                 exclusions, sink: Callable[[tuple], None] | None):
        self.q = q
        self.view = view
        self.cfg = cfg
        self.counters = counters
        self.exclusions = exclusions or None
        self.sink = sink
        self.out: list[tuple] = []
        self.used: set[int] = set()
        self.emitted = 0

    def tick(self):
        c = self.counters
        c.calls += 1
        if self.cfg.deadline is not None and c.calls % self.cfg.poll_interval == 0:
            if time.monotonic() > self.cfg.deadline:
                raise BudgetExceeded()

    def emit(self, M):
        m = tuple(M)
        self.counters.results += 1
        self.emitted += 1
        if self.sink is None:
            self.out.append(m)
        else:
            self.sink(m)
        if self.cfg.limit is not None and self.emitted >= self.cfg.limit:
            raise LimitReached()


def _run(search: _Search, body, M) -> list[tuple]:
    try:
        body(M)
    except LimitReached:
        pass
    return search.out


# -- static order --------------------------------------------------------------------------


def enumerate_matches(q: QueryGraph, order: MatchingOrder, view, seed: dict[int, int] | None,
                      cfg: EnumerationConfig, counters: Counters,
                      exclusions: dict[int, set] | None = None,
                      sink: Callable[[tuple], None] | None = None) -> list[tuple]:
    """All extensions of ``seed`` to full matches along ``order``.

    ``seed`` must map a prefix of the order.  Results are returned as tuples
    of data vertices in query-vertex order (or passed to ``sink``).
    """
    seed = seed or {}
    depth0 = len(seed)
    if set(seed) != set(order.order[:depth0]):
        raise OrderError("seed must map a prefix of the matching order")
    M = [-1] * q.n
    for u, v in seed.items():
        M[u] = v
    search = _Search(q, view, cfg, counters, exclusions, sink)
    if not seed_consistent(q, view.g, view, M, exclusions, cfg.injective):
        return []
    if cfg.injective:
        search.used.update(seed.values())
    n = q.n
    back = order.back
    seq = order.order
    injective = cfg.injective
    used = search.used
    excl = search.exclusions

    def rec(i):
        search.tick()
        if i == n:
            search.emit(M)
            return
        u = seq[i]
        if i == 0:
            cands = view.seed_candidates(u)
        else:
            cands = local_candidates(view, M, u, back[i], excl)
        if not cands:
            if i:
                counters.emp += 1
            return
        for w in cands:
            if injective:
                if w in used:
                    counters.vis += 1
                    continue
                used.add(w)
                M[u] = w
                rec(i + 1)
                used.discard(w)
            else:
                M[u] = w
                rec(i + 1)
        M[u] = -1

    return _run(search, lambda _: rec(depth0), M)


# -- dynamic order ----------------------------------------------------------------------------


def enumerate_dynamic(q: QueryGraph, view, seed: dict[int, int] | None, cfg: EnumerationConfig,
                      counters: Counters, exclusions: dict[int, set] | None = None,
                      sink: Callable[[tuple], None] | None = None,
                      start: int | None = None) -> list[tuple]:
    """Enumeration picking, per partial match, the frontier vertex with fewest candidates.

    Candidates of a frontier vertex intersect over all of its mapped
    neighbors.  Ties go to the smaller query vertex id.  With an empty seed
    the search starts from ``start`` (default: vertex 0).
    """
    seed = seed or {}
    M = [-1] * q.n
    for u, v in seed.items():
        M[u] = v
    search = _Search(q, view, cfg, counters, exclusions, sink)
    if not seed_consistent(q, view.g, view, M, exclusions, cfg.injective):
        return []
    injective = cfg.injective
    used = search.used
    if injective:
        used.update(seed.values())
    excl = search.exclusions
    n = q.n
    nbrs = q.nbrs

    def consulted(u):
        return [(w, q.edge_label(u, w), q.edge_index(u, w)) for w in nbrs[u] if M[w] >= 0]

    def rec(depth):
        search.tick()
        if depth == n:
            search.emit(M)
            return
        if depth == 0:
            u = start if start is not None else 0
            cands = view.seed_candidates(u)
        else:
            u, cands = None, None
            for x in range(n):
                if M[x] >= 0 or not any(M[w] >= 0 for w in nbrs[x]):
                    continue
                cx = local_candidates(view, M, x, consulted(x), excl)
                if cands is None or len(cx) < len(cands):
                    u, cands = x, cx
                    if not cx:
                        break
        if not cands:
            if depth:
                counters.emp += 1
            return
        for w in cands:
            if injective:
                if w in used:
                    counters.vis += 1
                    continue
                used.add(w)
                M[u] = w
                rec(depth + 1)
                used.discard(w)
            else:
                M[u] = w
                rec(depth + 1)
        M[u] = -1

    return _run(search, lambda _: rec(len(seed)), M)


# -- binary join ---------------------------------------------------------------------------------


def hash_join(left: Iterable[tuple], left_schema: tuple[int, ...],
              right: Iterable[tuple], right_schema: tuple[int, ...],
              injective: bool = False) -> tuple[tuple[int, ...], list[tuple]]:
    """Natural join of two tuple sets on their shared attributes.

    Returns the output schema (left attributes followed by the right-only
    ones) and the joined tuples.  The smaller input is hashed.
    """
    left = list(left)
    right = list(right)
    shared = [a for a in left_schema if a in right_schema]
    lk = [left_schema.index(a) for a in shared]
    rk = [right_schema.index(a) for a in shared]
    extra = [i for i, a in enumerate(right_schema) if a not in left_schema]
    schema = tuple(left_schema) + tuple(right_schema[i] for i in extra)
    out = []
    if not left or not right:
        return schema, out
    if len(left) <= len(right):
        table: dict[tuple, list[tuple]] = {}
        for t in left:
            table.setdefault(tuple(t[i] for i in lk), []).append(t)
        for r in right:
            for t in table.get(tuple(r[i] for i in rk), ()):
                out.append(t + tuple(r[i] for i in extra))
    else:
        table = {}
        for r in right:
            table.setdefault(tuple(r[i] for i in rk), []).append(r)
        for t in left:
            for r in table.get(tuple(t[i] for i in lk), ()):
                out.append(t + tuple(r[i] for i in extra))
    if injective:
        out = [t for t in out if len(set(t)) == len(t)]
    return schema, out


def verify_match(q: QueryGraph, g: LabeledGraph, m: tuple, injective: bool = False) -> bool:
    """Post-hoc check of every label and edge constraint of a full match."""
    if len(m) != q.n:
        return False
    for u, v in enumerate(m):
        if not g.has_vertex(v) or g.labels[v] != q.labels[u]:
            return False
    for a, b, lab in q.edges:
        if g.edge_label(m[a], m[b]) != lab:
            return False
    return not injective or len(set(m)) == len(m)
