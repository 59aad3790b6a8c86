"""Query graphs and the offline structures derived from them.

A ``QueryGraph`` fixes a canonical numbering of its edges (the order in which
they appear in the query file).  Every algorithm refers to query edges by that
index.  ``SpanningTree`` is the rooted tree used by the DCG index and
``QueryDag`` the breadth-first DAG used by the DCS index.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import LabeledGraph, ParseError, _open_lines, _strip, parse_graph

TREE = "tree"
SPARSE = "sparse"
DENSE = "dense"


class QueryError(Exception):
    pass


class QueryGraph:
    """A connected labeled query graph with a stable edge numbering."""

    def __init__(self, labels: list[int], edges: Iterable[tuple[int, int, int]], name: str = "q"):
        self.name = name
        self.labels = list(labels)
        self.edges: list[tuple[int, int, int]] = []
        self.n = len(self.labels)
        self.nbrs: list[list[int]] = [[] for _ in range(self.n)]
        self._edge_index: dict[tuple[int, int], int] = {}
        for a, b, lab in edges:
            if a == b:
                raise QueryError(f"self-loop on query vertex {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise QueryError(f"edge ({a}, {b}) references an unknown vertex")
            if (a, b) in self._edge_index:
                raise QueryError(f"parallel query edge ({a}, {b})")
            k = len(self.edges)
            self.edges.append((a, b, lab))
            self._edge_index[(a, b)] = k
            self._edge_index[(b, a)] = k
            self.nbrs[a].append(b)
            self.nbrs[b].append(a)
        for row in self.nbrs:
            row.sort()
        if self.n and not self.is_connected():
            raise QueryError("query graph must be connected")

    @classmethod
    def from_graph(cls, g: LabeledGraph, edge_order: list[tuple[int, int]] | None = None,
                   name: str = "q") -> "QueryGraph":
        labels = [g.labels[v] for v in range(g.capacity)]
        if any(lab is None for lab in labels):
            raise QueryError("query graphs may not contain deleted vertices")
        if edge_order is None:
            edges = list(g.edges())
        else:
            edges = [(a, b, g.edge_label(a, b)) for a, b in edge_order]
        return cls(labels, edges, name)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_index(self, a: int, b: int) -> int | None:
        return self._edge_index.get((a, b))

    def edge_label(self, a: int, b: int) -> int:
        return self.edges[self._edge_index[(a, b)]][2]

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self._edge_index

    def degree(self, u: int) -> int:
        return len(self.nbrs[u])

    def is_connected(self) -> bool:
        seen = {0}
        todo = [0]
        while todo:
            u = todo.pop()
            for w in self.nbrs[u]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.n

    def is_tree(self) -> bool:
        return self.edge_count == self.n - 1

    def to_graph(self) -> LabeledGraph:
        g = LabeledGraph()
        for lab in self.labels:
            g.add_vertex(lab)
        for a, b, lab in self.edges:
            g.insert_edge(a, b, lab)
        return g

    def dumps(self) -> str:
        lines = [f"v {u} {lab}" for u, lab in enumerate(self.labels)]
        lines += [f"e {a} {b} {lab}" for a, b, lab in self.edges]
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"QueryGraph({self.name!r}, |V|={self.n}, |E|={self.edge_count})"


def parse_query(lines: list[str], path: str | None = None, name: str = "q") -> QueryGraph:
    g = parse_graph(lines, path)
    order = []
    for lineno, raw in enumerate(lines, 1):
        line = _strip(raw)
        if line.startswith("e"):
            a, b = line.split()[1:3]
            order.append((g.id_map[int(a)], g.id_map[int(b)]))
    try:
        return QueryGraph.from_graph(g, order, name)
    except QueryError as exc:
        raise ParseError(str(exc), path=path) from None


def load_query(path, name: str | None = None) -> QueryGraph:
    lines, fname = _open_lines(path)
    if name is None:
        import os
        name = os.path.splitext(os.path.basename(fname))[0]
    return parse_query(lines, fname, name)


# -- classification ---------------------------------------------------------------


def average_degree(q: QueryGraph) -> float:
    return 2.0 * q.edge_count / q.n


def classify_query(q: QueryGraph) -> str:
    if q.edge_count == q.n - 1:
        return TREE
    if average_degree(q) <= 3:
        return SPARSE
    return DENSE


def bfs_distances(q: QueryGraph, src: int) -> list[int]:
    dist = [-1] * q.n
    dist[src] = 0
    todo = deque([src])
    while todo:
        u = todo.popleft()
        for w in q.nbrs[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                todo.append(w)
    return dist


def diameter(q: QueryGraph) -> int:
    return max(max(bfs_distances(q, u)) for u in range(q.n))


# -- relation sizes -------------------------------------------------------------------


def relation_sizes(q: QueryGraph, g: LabeledGraph) -> list[int]:
    """|R_k| for every query edge: data edges matching edge k in some orientation."""
    by_label: dict[int, list[int]] = {}
    for k, (_, _, lab) in enumerate(q.edges):
        by_label.setdefault(lab, []).append(k)
    sizes = [0] * q.edge_count
    ql = q.labels
    gl = g.labels
    for a, b, lab in g.edges():
        ks = by_label.get(lab)
        if not ks:
            continue
        la, lb = gl[a], gl[b]
        for k in ks:
            x, y, _ = q.edges[k]
            if (ql[x] == la and ql[y] == lb) or (ql[x] == lb and ql[y] == la):
                sizes[k] += 1
    return sizes


# -- spanning tree ----------------------------------------------------------------------


@dataclass
class SpanningTree:
    root: int
    parent: dict[int, int | None]
    children: dict[int, list[int]]
    order: list[int]                       # depth-first order from the root
    tree_edges: set[tuple[int, int]] = field(default_factory=set)       # (parent, child)
    non_tree_edges: list[int] = field(default_factory=list)             # canonical indices

    def path(self, u: int) -> list[int]:
        """Vertices from the root down to ``u``."""
        out = [u]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        out.reverse()
        return out

    def subtree(self, u: int) -> list[int]:
        out = [u]
        i = 0
        while i < len(out):
            out.extend(self.children[out[i]])
            i += 1
        return out

    def leaves(self) -> list[int]:
        return [u for u in self.order if not self.children[u]]

    def is_tree_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.tree_edges or (b, a) in self.tree_edges

    def depth_first(self) -> list[int]:
        return list(self.order)


def _finish_tree(q: QueryGraph, root: int, parent: dict[int, int | None]) -> SpanningTree:
    children: dict[int, list[int]] = {u: [] for u in range(q.n)}
    tree_edges = set()
    for u, p in parent.items():
        if p is not None:
            children[p].append(u)
            tree_edges.add((p, u))
    for row in children.values():
        row.sort()
    order = []
    stack = [root]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(reversed(children[u]))
    non_tree = [k for k, (a, b, _) in enumerate(q.edges)
                if (a, b) not in tree_edges and (b, a) not in tree_edges]
    return SpanningTree(root, parent, children, order, tree_edges, non_tree)


def build_spanning_tree(q: QueryGraph, g: LabeledGraph, root: int | None = None) -> SpanningTree:
    """Greedy spanning tree grown along the least frequent query edges.

    The root is the less frequent endpoint of the least frequent query edge
    unless given.  Frequency ties: smaller vertex id, then smaller edge.  When
    growing, ties between equally frequent edges go to the edge whose tree
    endpoint joined the tree first, then to the smaller new vertex id.
    """
    sizes = relation_sizes(q, g)
    label_freq = g.label_counts()
    if root is None:
        if q.edge_count == 0:
            root = 0
        else:
            k = min(range(q.edge_count),
                    key=lambda i: (sizes[i], min(q.edges[i][:2]), q.edges[i][:2]))
            a, b, _ = q.edges[k]
            root = min((a, b), key=lambda u: (label_freq.get(q.labels[u], 0), u))
    parent: dict[int, int | None] = {root: None}
    joined = {root: 0}
    while len(parent) < q.n:
        best = None
        for k, (a, b, _) in enumerate(q.edges):
            if (a in parent) == (b in parent):
                continue
            inside, new = (a, b) if a in parent else (b, a)
            key = (sizes[k], joined[inside], new, k)
            if best is None or key < best[0]:
                best = (key, inside, new)
        _, inside, new = best
        parent[new] = inside
        joined[new] = len(joined)
    return _finish_tree(q, root, parent)


def bfs_spanning_tree(q: QueryGraph, root: int) -> SpanningTree:
    """Breadth-first spanning tree: every vertex hangs off its first BFS parent."""
    parent: dict[int, int | None] = {root: None}
    todo = deque([root])
    while todo:
        u = todo.popleft()
        for w in q.nbrs[u]:
            if w not in parent:
                parent[w] = u
                todo.append(w)
    return _finish_tree(q, root, parent)


def dfs_tree(q: QueryGraph, root: int) -> SpanningTree:
    """Depth-first spanning tree; equals the query itself when it is a tree."""
    parent: dict[int, int | None] = {root: None}
    stack = [(root, iter(q.nbrs[root]))]
    while stack:
        u, it = stack[-1]
        for w in it:
            if w not in parent:
                parent[w] = u
                stack.append((w, iter(q.nbrs[w])))
                break
        else:
            stack.pop()
    return _finish_tree(q, root, parent)


# -- DAG ------------------------------------------------------------------------------


@dataclass
class QueryDag:
    root: int
    order: list[int]                 # breadth-first order
    position: dict[int, int]
    parents: dict[int, list[int]]
    children: dict[int, list[int]]

    @property
    def height(self) -> int:
        return _dag_height(self)

    def sinks(self) -> list[int]:
        return [u for u in self.order if not self.children[u]]

    def topological_order(self) -> list[int]:
        return list(self.order)

    def paths_from_root(self, u: int) -> list[list[int]]:
        if u == self.root:
            return [[u]]
        return [p + [u] for w in self.parents[u] for p in self.paths_from_root(w)]

    def paths_to_sinks(self, u: int) -> list[list[int]]:
        if not self.children[u]:
            return [[u]]
        return [[u] + p for w in self.children[u] for p in self.paths_to_sinks(w)]


def _bfs_dag(q: QueryGraph, root: int) -> QueryDag:
    order = [root]
    seen = {root}
    i = 0
    while i < len(order):
        for w in q.nbrs[order[i]]:
            if w not in seen:
                seen.add(w)
                order.append(w)
        i += 1
    pos = {u: i for i, u in enumerate(order)}
    parents = {u: [] for u in order}
    children = {u: [] for u in order}
    for a, b, _ in q.edges:
        if pos[a] > pos[b]:
            a, b = b, a
        parents[b].append(a)
        children[a].append(b)
    for d in (parents, children):
        for row in d.values():
            row.sort(key=pos.__getitem__)
    return QueryDag(root, order, pos, parents, children)


def _dag_height(dag: QueryDag) -> int:
    depth = {dag.root: 0}
    for u in dag.order[1:]:
        depth[u] = max(depth[p] for p in dag.parents[u]) + 1
    return max(depth.values())


def build_dag(q: QueryGraph, root: int | None = None) -> QueryDag:
    """BFS DAG from the root giving the tallest DAG (ties: smallest id)."""
    if root is not None:
        return _bfs_dag(q, root)
    best = None
    for u in range(q.n):
        dag = _bfs_dag(q, u)
        h = _dag_height(dag)
        if best is None or h > best[0]:
            best = (h, dag)
    return best[1]
