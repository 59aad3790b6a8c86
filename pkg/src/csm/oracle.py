"""Brute-force ground truth for matches and incremental matches.

Written independently of the enumeration engine: it works from a plain
edge dictionary, grows partial matches in breadth-first query order, and
tests every constraint by dictionary lookup instead of sorted intersection.
"""

from __future__ import annotations

import itertools
from collections import deque

from .graph import LabeledGraph
from .query import QueryGraph

MAX_QUERY_VERTICES = 8
MAX_DATA_VERTICES = 64


class OracleGuardError(ValueError):
    """Input too large for the brute-force oracle."""


def _edge_dict(g: LabeledGraph) -> dict[tuple[int, int], int]:
    out = {}
    for a, b, lab in g.edges():
        out[(a, b)] = lab
        out[(b, a)] = lab
    return out


def _check_size(q: QueryGraph, g: LabeledGraph) -> None:
    if q.n > MAX_QUERY_VERTICES or g.vertex_count > MAX_DATA_VERTICES:
        raise OracleGuardError(
            f"oracle limited to |V(Q)| <= {MAX_QUERY_VERTICES} and |V(G)| <= {MAX_DATA_VERTICES}")


def oracle_matches(q: QueryGraph, g: LabeledGraph, semantics: str = "homo",
                   guard: bool = True) -> set[tuple[int, ...]]:
    """Every match of ``q`` in ``g`` as a tuple of data vertices in query-vertex order."""
    if guard:
        _check_size(q, g)
    injective = semantics == "iso"
    edges = _edge_dict(g)
    labels = g.labels
    by_label: dict[int, list[int]] = {}
    for v in range(g.capacity):
        if labels[v] is not None:
            by_label.setdefault(labels[v], []).append(v)
    # neighbors of each vertex split by neighbor label and edge label
    nbr: dict[tuple[int, int, int], list[int]] = {}
    for (a, b), lab in edges.items():
        nbr.setdefault((a, labels[b], lab), []).append(b)

    # breadth-first query order with, per vertex, the earlier neighbors to test
    order = [0]
    seen = {0}
    todo = deque([0])
    while todo:
        u = todo.popleft()
        for w in q.nbrs[u]:
            if w not in seen:
                seen.add(w)
                order.append(w)
                todo.append(w)
    placed: set[int] = set()
    checks = []
    for u in order:
        back = [(w, q.edge_label(u, w)) for w in q.nbrs[u] if w in placed]
        # the first back edge picks the pool, the rest are tested
        checks.append((back[0], back[1:]) if back else (None, []))
        placed.add(u)

    found: set[tuple[int, ...]] = set()
    assign = [-1] * q.n
    used: set[int] = set()

    def grow(i):
        if i == len(order):
            found.add(tuple(assign))
            return
        u = order[i]
        lab_u = q.labels[u]
        anchor, chk = checks[i]
        if anchor is not None:
            pool = nbr.get((assign[anchor[0]], lab_u, anchor[1]), ())
        else:
            pool = by_label.get(lab_u, ())
        for v in pool:
            if injective and v in used:
                continue
            if all(edges.get((assign[w], v)) == lab for w, lab in chk):
                assign[u] = v
                used.add(v)
                grow(i + 1)
                used.discard(v)
        assign[u] = -1

    grow(0)
    return found


def brute_force_matches(q: QueryGraph, g: LabeledGraph, semantics: str = "homo") -> set[tuple[int, ...]]:
    """Filter over all |V(G)|^|V(Q)| assignments; only for very small inputs."""
    edges = _edge_dict(g)
    live = [v for v in range(g.capacity) if g.labels[v] is not None]
    out = set()
    for m in itertools.product(live, repeat=q.n):
        if semantics == "iso" and len(set(m)) != len(m):
            continue
        if any(g.labels[v] != q.labels[u] for u, v in enumerate(m)):
            continue
        if all(edges.get((m[a], m[b])) == lab for a, b, lab in q.edges):
            out.add(m)
    return out


def oracle_delta(q: QueryGraph, g_before: LabeledGraph, g_after: LabeledGraph,
                 semantics: str = "homo", guard: bool = True
                 ) -> tuple[set[tuple[int, ...]], set[tuple[int, ...]]]:
    """(positive, negative) incremental matches between two graph snapshots."""
    before = oracle_matches(q, g_before, semantics, guard)
    after = oracle_matches(q, g_after, semantics, guard)
    return after - before, before - after


def complete_relation(q: QueryGraph, g: LabeledGraph, k: int, semantics: str = "homo",
                      matches: set | None = None) -> set[tuple[int, int]]:
    """Data edges (oriented as query edge ``k``) that take part in some match."""
    if matches is None:
        matches = oracle_matches(q, g, semantics)
    a, b, _ = q.edges[k]
    return {(m[a], m[b]) for m in matches}


def match_projection(q: QueryGraph, matches) -> list[set[int]]:
    """Per query vertex, the data vertices it is mapped to in some match."""
    out = [set() for _ in range(q.n)]
    for m in matches:
        for u, v in enumerate(m):
            out[u].add(v)
    return out
