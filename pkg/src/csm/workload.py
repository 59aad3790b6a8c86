"""Workload tooling: update streams from static graphs, label assignment, query extraction."""

from __future__ import annotations

import os
import random
from typing import Iterable

from .graph import DELETE, INSERT, EdgeUpdate, LabeledGraph, UpdateStream
from .query import DENSE, SPARSE, TREE, QueryGraph, classify_query

DISTRIBUTIONS = ("original", "uniform", "linear", "zipfian")
SHAPES = ("tree", "sparse", "dense", "path", "star", "cycle")


class WorkloadError(ValueError):
    pass


def resolve_seed(seed: int | None) -> int:
    """``CSM_SEED`` in the environment wins over an explicit seed."""
    env = os.environ.get("CSM_SEED")
    if env is not None:
        return int(env)
    return 0 if seed is None else seed


# -- random inputs ------------------------------------------------------------------------


def random_graph(n: int, m: int, vertex_labels: int = 1, edge_labels: int = 1,
                 rng: random.Random | None = None) -> LabeledGraph:
    """Uniform random simple graph with ``n`` vertices and (at most) ``m`` edges."""
    rng = rng or random.Random(0)
    g = LabeledGraph()
    for _ in range(n):
        g.add_vertex(rng.randrange(vertex_labels))
    m = min(m, n * (n - 1) // 2)
    seen = set()
    while len(seen) < m:
        a, b = rng.randrange(n), rng.randrange(n)
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in seen:
            continue
        seen.add(key)
        g.insert_edge(a, b, rng.randrange(edge_labels))
    return g


# -- streams -----------------------------------------------------------------------------------


def sample_stream(g: LabeledGraph, rate: float, mode: str = "random", op: str = INSERT,
                  seed: int = 0, edge_order: list[tuple[int, int, int]] | None = None
                  ) -> tuple[LabeledGraph, UpdateStream]:
    """Split ``g`` into an initial graph and a stream of single-edge updates.

    ``rate`` is the fraction of edges put in the stream.  ``mode`` is
    ``suffix`` (the last edges of ``edge_order``) or ``random``.  With
    ``op='-'`` the initial graph is all of ``g`` and the stream deletes the
    sampled edges.  Ids in the stream are the graph's external ids.
    """
    if not 0 < rate <= 1:
        raise WorkloadError("rate must lie in (0, 1]")
    edges = list(edge_order) if edge_order is not None else list(g.edges())
    count = round(rate * len(edges))
    if mode == "suffix":
        picked = edges[len(edges) - count:]
    elif mode == "random":
        rng = random.Random(seed)
        idx = sorted(rng.sample(range(len(edges)), count))
        picked = [edges[i] for i in idx]
        rng.shuffle(picked)
    else:
        raise WorkloadError(f"unknown sampling mode {mode!r}")
    ext = g.external_ids
    init = g.copy()
    if op == INSERT:
        for a, b, _ in picked:
            init.delete_edge(a, b)
    elif op != DELETE:
        raise WorkloadError(f"unknown op {op!r}")
    stream = UpdateStream([[EdgeUpdate(op, ext[a], ext[b], lab)] for a, b, lab in picked])
    return init, stream


# -- labels --------------------------------------------------------------------------------------


def label_probabilities(k: int, distribution: str) -> list[float]:
    if k < 1:
        raise WorkloadError("need at least one label")
    if distribution == "uniform":
        w = [1.0] * k
    elif distribution == "linear":
        w = [float(k - i) for i in range(k)]
    elif distribution == "zipfian":
        w = [1.0 / (i + 1) for i in range(k)]
    else:
        raise WorkloadError(f"unknown distribution {distribution!r}")
    s = sum(w)
    return [x / s for x in w]


def assign_labels(g: LabeledGraph, k: int, distribution: str = "uniform", seed: int = 0,
                  target: str = "vertex") -> LabeledGraph:
    """Copy of ``g`` with vertex (or edge) labels drawn from ``distribution`` over ``0..k-1``.

    ``original`` keeps the labels the graph already has.
    """
    if distribution == "original":
        if target not in ("vertex", "edge"):
            raise WorkloadError(f"unknown label target {target!r}")
        return g.copy()
    probs = label_probabilities(k, distribution)
    rng = random.Random(seed)
    labels = range(k)
    if target == "vertex":
        out = g.copy()
        live = list(g.vertices())
        out.relabel_all(dict(zip(live, rng.choices(labels, probs, k=len(live)))))
        return out
    if target == "edge":
        out = g.copy()
        edges = list(g.edges())
        for (a, b, _), lab in zip(edges, rng.choices(labels, probs, k=len(edges))):
            out.delete_edge(a, b)
            out.insert_edge(a, b, lab)
        return out
    raise WorkloadError(f"unknown label target {target!r}")


# -- queries ------------------------------------------------------------------------------------


def _make_query(g: LabeledGraph, verts: list[int], edges: Iterable[tuple[int, int]], name: str) -> QueryGraph:
    ids = {v: i for i, v in enumerate(verts)}
    qe = []
    for a, b in edges:
        x, y = ids[a], ids[b]
        qe.append((min(x, y), max(x, y), g.edge_label(a, b)))
    qe.sort()
    return QueryGraph([g.labels[v] for v in verts], qe, name)


def _walk_tree(g, rng, size):
    start = rng.choice([v for v in g.vertices() if g.adj[v]])
    verts, edges = [start], []
    inside = {start}
    for _ in range(50 * size):
        if len(verts) == size:
            return verts, edges
        v = rng.choice(verts)
        if not g.adj[v]:
            continue
        w = rng.choice(g.adj[v])
        if w not in inside:
            inside.add(w)
            verts.append(w)
            edges.append((v, w))
    return None


def _walk_path(g, rng, size):
    v = rng.choice([v for v in g.vertices() if g.adj[v]])
    verts = [v]
    while len(verts) < size:
        options = [w for w in g.adj[verts[-1]] if w not in verts]
        if not options:
            return None
        verts.append(rng.choice(options))
    return verts, list(zip(verts, verts[1:]))


def _walk_star(g, rng, size):
    centers = [v for v in g.vertices() if len(g.adj[v]) >= size - 1]
    if not centers:
        return None
    c = rng.choice(centers)
    leaves = rng.sample(g.adj[c], size - 1)
    return [c] + leaves, [(c, w) for w in leaves]


def _walk_cycle(g, rng, size):
    start = rng.choice([v for v in g.vertices() if len(g.adj[v]) >= 2])
    path = [start]
    # randomized depth-first search for a simple cycle through ``start``
    stack = [iter(rng.sample(g.adj[start], len(g.adj[start])))]
    budget = 2000
    while stack and budget:
        budget -= 1
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            path.pop()
            continue
        if len(path) == size:
            if nxt == start:
                return list(path), list(zip(path, path[1:])) + [(path[-1], start)]
            continue
        if nxt in path:
            continue
        path.append(nxt)
        stack.append(iter(rng.sample(g.adj[nxt], len(g.adj[nxt]))))
    return None


def _walk_induced(g, rng, size):
    found = _walk_tree(g, rng, size)
    if found is None:
        return None
    verts = found[0]
    inside = set(verts)
    edges = [(a, b) for a in verts for b in g.adj[a] if b in inside and a < b]
    return verts, edges


def shape_matches(q: QueryGraph, shape: str) -> bool:
    if shape in (TREE, SPARSE, DENSE):
        return classify_query(q) == shape
    degs = [q.degree(u) for u in range(q.n)]
    if shape == "path":
        return q.is_tree() and max(degs) <= 2
    if shape == "star":
        return q.is_tree() and (q.n <= 2 or sorted(degs)[-1] == q.n - 1)
    if shape == "cycle":
        return q.edge_count == q.n and all(d == 2 for d in degs)
    raise WorkloadError(f"unknown shape {shape!r}")


def extract_queries(g: LabeledGraph, shape: str, size: int, count: int, seed: int = 0,
                    max_attempts: int = 2000) -> list[QueryGraph]:
    """Random-walk extraction of ``count`` connected queries of the given shape and size."""
    if shape not in SHAPES:
        raise WorkloadError(f"unknown shape {shape!r}")
    if size < 2:
        raise WorkloadError("queries need at least two vertices")
    if shape == "cycle" and size < 3:
        raise WorkloadError("cycles need at least three vertices")
    walker = {"tree": _walk_tree, "path": _walk_path, "star": _walk_star, "cycle": _walk_cycle,
              "sparse": _walk_induced, "dense": _walk_induced}[shape]
    rng = random.Random(seed)
    out: list[QueryGraph] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > max_attempts * count:
            raise WorkloadError(f"could not extract {count} {shape} queries of size {size}")
        found = walker(g, rng, size)
        if found is None:
            continue
        q = _make_query(g, found[0], found[1], f"{shape}{size}_{len(out)}")
        if shape_matches(q, shape):
            out.append(q)
    return out
