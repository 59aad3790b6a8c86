"""Labeled undirected graphs with sorted adjacency arrays, plus file I/O.

Both the data graph and the query graph are ``LabeledGraph`` instances.  Each
vertex carries one integer label and each edge one integer label.  The
neighbors of a vertex are kept in an array sorted by vertex id, with a
parallel array of edge labels, so insertion and deletion are binary searches.

File grammar (UTF-8, line oriented, ``#`` starts a comment)::

    v <id> [<label>]            # vertex lines first
    e <src> <dst> [<label>]     # then edge lines

Update streams::

    + <src> <dst> [<elabel> [<srclabel> <dstlabel>]]
    - <src> <dst> [<elabel>]
    --                          # batch separator

Without any ``--`` line every operation is its own batch.  When separators are
present, the operations between two separators form one batch.
"""

from __future__ import annotations

import io
import os
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

INSERT = "+"
DELETE = "-"


class GraphError(Exception):
    """Base class for graph invariant violations."""


class UnknownVertexError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class MissingEdgeError(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


@dataclass(frozen=True)
class EdgeUpdate:
    """A signed edge operation.  Vertex ids are internal unless ``external``."""

    op: str
    src: int
    dst: int
    label: int = 0
    src_label: int | None = None
    dst_label: int | None = None

    def __post_init__(self):
        if self.op not in (INSERT, DELETE):
            raise ValueError(f"bad op {self.op!r}")
        if self.src == self.dst:
            raise GraphError(f"self-loop on vertex {self.src}")

    @property
    def key(self) -> tuple[int, int, int]:
        """Orientation-free identity of the edge, used for batch cancellation."""
        a, b = (self.src, self.dst) if self.src < self.dst else (self.dst, self.src)
        return a, b, self.label


@dataclass(frozen=True)
class VertexUpdate:
    """Insertion or deletion of an isolated vertex."""

    op: str
    vertex: int
    label: int = 0


@dataclass
class UpdateStream:
    batches: list[list[EdgeUpdate]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.batches)

    def __len__(self):
        return len(self.batches)

    def __getitem__(self, i):
        return self.batches[i]

    @property
    def op_count(self) -> int:
        return sum(len(b) for b in self.batches)


class LabeledGraph:
    """Mutable undirected vertex- and edge-labeled graph.

    Vertex ids are dense integers.  A deleted vertex keeps its id with label
    ``None`` so ids of later vertices stay stable.
    """

    def __init__(self):
        self.labels: list[int | None] = []
        self.adj: list[list[int]] = []
        self.adj_labels: list[list[int]] = []
        self.edge_count = 0
        self._by_label: dict[int, set[int]] = {}
        self.external_ids: list[int] = []
        self.id_map: dict[int, int] = {}

    # -- vertices -----------------------------------------------------------

    def add_vertex(self, label: int = 0, external: int | None = None) -> int:
        v = len(self.labels)
        if external is None:
            external = v
        if external in self.id_map:
            raise GraphError(f"vertex {external} already exists")
        self.labels.append(label)
        self.adj.append([])
        self.adj_labels.append([])
        self._by_label.setdefault(label, set()).add(v)
        self.external_ids.append(external)
        self.id_map[external] = v
        return v

    def remove_vertex(self, v: int) -> None:
        self._check(v)
        if self.adj[v]:
            raise GraphError(f"vertex {v} still has {len(self.adj[v])} edges")
        self._by_label[self.labels[v]].discard(v)
        self.labels[v] = None

    def set_label(self, v: int, label: int) -> None:
        self._check(v)
        if self.adj[v]:
            raise GraphError(f"relabeling vertex {v} requires it to be isolated")
        self._by_label[self.labels[v]].discard(v)
        self.labels[v] = label
        self._by_label.setdefault(label, set()).add(v)

    def relabel_all(self, labels: dict[int, int]) -> None:
        """Bulk relabeling that ignores incident edges (for workload generation)."""
        for v, label in labels.items():
            self._check(v)
            self._by_label[self.labels[v]].discard(v)
            self.labels[v] = label
            self._by_label.setdefault(label, set()).add(v)

    def has_vertex(self, v: int) -> bool:
        return 0 <= v < len(self.labels) and self.labels[v] is not None

    def label(self, v: int) -> int:
        return self.labels[v]

    @property
    def vertex_count(self) -> int:
        return len(self.labels) - sum(1 for x in self.labels if x is None)

    @property
    def capacity(self) -> int:
        """One past the largest vertex id ever allocated."""
        return len(self.labels)

    def vertices(self) -> Iterator[int]:
        return (v for v, lab in enumerate(self.labels) if lab is not None)

    def vertices_with_label(self, label: int) -> set[int]:
        return self._by_label.get(label, set())

    def label_counts(self) -> dict[int, int]:
        return {lab: len(vs) for lab, vs in self._by_label.items() if vs}

    def _check(self, v: int) -> None:
        if not self.has_vertex(v):
            raise UnknownVertexError(f"unknown vertex {v}")

    # -- edges --------------------------------------------------------------

    def insert_edge(self, a: int, b: int, label: int = 0) -> None:
        self._check(a)
        self._check(b)
        if a == b:
            raise GraphError(f"self-loop on vertex {a}")
        row = self.adj[a]
        i = bisect_left(row, b)
        if i < len(row) and row[i] == b:
            raise DuplicateEdgeError(f"edge ({a}, {b}) already exists")
        row.insert(i, b)
        self.adj_labels[a].insert(i, label)
        row = self.adj[b]
        j = bisect_left(row, a)
        row.insert(j, a)
        self.adj_labels[b].insert(j, label)
        self.edge_count += 1

    def delete_edge(self, a: int, b: int, label: int | None = None) -> int:
        """Remove edge (a, b) and return its label."""
        self._check(a)
        self._check(b)
        row = self.adj[a]
        i = bisect_left(row, b)
        if i == len(row) or row[i] != b:
            raise MissingEdgeError(f"edge ({a}, {b}) does not exist")
        found = self.adj_labels[a][i]
        if label is not None and found != label:
            raise MissingEdgeError(f"edge ({a}, {b}) has label {found}, not {label}")
        del row[i]
        del self.adj_labels[a][i]
        row = self.adj[b]
        j = bisect_left(row, a)
        del row[j]
        del self.adj_labels[b][j]
        self.edge_count -= 1
        return found

    def apply(self, u: EdgeUpdate) -> None:
        if u.op == INSERT:
            self.insert_edge(u.src, u.dst, u.label)
        else:
            self.delete_edge(u.src, u.dst, u.label)

    def edge_label(self, a: int, b: int) -> int | None:
        row = self.adj[a]
        i = bisect_left(row, b)
        if i < len(row) and row[i] == b:
            return self.adj_labels[a][i]
        return None

    def has_edge(self, a: int, b: int, label: int | None = None) -> bool:
        found = self.edge_label(a, b)
        return found is not None and (label is None or found == label)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int, edge_label: int | None = None,
                  vertex_label: int | None = None) -> list[int]:
        """Sorted neighbors of ``v``, optionally filtered by edge/vertex label."""
        self._check(v)
        row = self.adj[v]
        if edge_label is None and vertex_label is None:
            return list(row)
        labs = self.adj_labels[v]
        vl = self.labels
        if vertex_label is None:
            return [w for w, el in zip(row, labs) if el == edge_label]
        if edge_label is None:
            return [w for w in row if vl[w] == vertex_label]
        return [w for w, el in zip(row, labs) if el == edge_label and vl[w] == vertex_label]

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Each edge once as (a, b, label) with a < b."""
        for a, row in enumerate(self.adj):
            labs = self.adj_labels[a]
            for w, el in zip(row, labs):
                if a < w:
                    yield a, w, el

    def edge_set(self) -> set[tuple[int, int, int]]:
        return set(self.edges())

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph()
        g.labels = list(self.labels)
        g.adj = [list(r) for r in self.adj]
        g.adj_labels = [list(r) for r in self.adj_labels]
        g.edge_count = self.edge_count
        g._by_label = {k: set(v) for k, v in self._by_label.items()}
        g.external_ids = list(self.external_ids)
        g.id_map = dict(self.id_map)
        return g

    def induced_subgraph(self, vertices: Iterable[int]) -> "LabeledGraph":
        """Vertex-induced subgraph; vertex ids are preserved (others removed)."""
        keep = set(vertices)
        g = LabeledGraph()
        g.external_ids = list(self.external_ids)
        g.id_map = dict(self.id_map)
        g.labels = [lab if v in keep else None for v, lab in enumerate(self.labels)]
        g.adj = [[] for _ in self.labels]
        g.adj_labels = [[] for _ in self.labels]
        for v in keep:
            if self.labels[v] is None:
                continue
            g._by_label.setdefault(self.labels[v], set()).add(v)
            row, labs = g.adj[v], g.adj_labels[v]
            for w, el in zip(self.adj[v], self.adj_labels[v]):
                if w in keep:
                    row.append(w)
                    labs.append(el)
                    if v < w:
                        g.edge_count += 1
        return g

    def check_invariants(self) -> None:
        count = 0
        for v, row in enumerate(self.adj):
            if self.labels[v] is None and row:
                raise GraphError(f"deleted vertex {v} has edges")
            for i in range(1, len(row)):
                if row[i - 1] >= row[i]:
                    raise GraphError(f"adjacency of {v} not strictly sorted")
            for w, el in zip(row, self.adj_labels[v]):
                if w == v:
                    raise GraphError(f"self-loop at {v}")
                if self.edge_label(w, v) != el:
                    raise GraphError(f"asymmetric edge ({v}, {w})")
            count += len(row)
        if count != 2 * self.edge_count:
            raise GraphError("edge_count out of sync with adjacency")

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (self.labels == other.labels and self.adj == other.adj
                and self.adj_labels == other.adj_labels)

    def __repr__(self):
        return f"LabeledGraph(|V|={self.vertex_count}, |E|={self.edge_count})"


# -- parsing ------------------------------------------------------------------


def _strip(line: str) -> str:
    i = line.find("#")
    if i >= 0:
        line = line[:i]
    return line.strip()


def _ints(tokens: list[str], lineno: int, path: str | None) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno, path) from None


def parse_graph(lines: Iterable[str], path: str | None = None) -> LabeledGraph:
    g = LabeledGraph()
    seen_edge = False
    for lineno, raw in enumerate(lines, 1):
        line = _strip(raw)
        if not line:
            continue
        kind, *rest = line.split()
        if kind == "v":
            if seen_edge:
                raise ParseError("vertex line after edge lines", lineno, path)
            if len(rest) not in (1, 2):
                raise ParseError("expected 'v <id> [<label>]'", lineno, path)
            vals = _ints(rest, lineno, path)
            ext, label = vals[0], (vals[1] if len(vals) == 2 else 0)
            if ext in g.id_map:
                raise ParseError(f"duplicate vertex {ext}", lineno, path)
            g.add_vertex(label, external=ext)
        elif kind == "e":
            seen_edge = True
            if len(rest) not in (2, 3):
                raise ParseError("expected 'e <src> <dst> [<label>]'", lineno, path)
            vals = _ints(rest, lineno, path)
            a, b = vals[0], vals[1]
            label = vals[2] if len(vals) == 3 else 0
            if a == b:
                raise ParseError(f"self-loop on vertex {a}", lineno, path)
            try:
                ia, ib = g.id_map[a], g.id_map[b]
            except KeyError as exc:
                raise ParseError(f"edge references unknown vertex {exc.args[0]}", lineno, path) from None
            try:
                g.insert_edge(ia, ib, label)
            except DuplicateEdgeError:
                raise ParseError(f"parallel edge ({a}, {b})", lineno, path) from None
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno, path)
    return g


def parse_stream(lines: Iterable[str], path: str | None = None) -> UpdateStream:
    """Parse an update stream.  Vertex ids stay external; see ``resolve_update``."""
    groups: list[list[EdgeUpdate]] = [[]]
    separated = False
    for lineno, raw in enumerate(lines, 1):
        line = _strip(raw)
        if not line:
            continue
        if line == "--":
            separated = True
            groups.append([])
            continue
        op, *rest = line.split()
        if op == INSERT:
            if len(rest) not in (2, 3, 5):
                raise ParseError("expected '+ <src> <dst> [<elabel> [<srclabel> <dstlabel>]]'", lineno, path)
        elif op == DELETE:
            if len(rest) not in (2, 3):
                raise ParseError("expected '- <src> <dst> [<elabel>]'", lineno, path)
        else:
            raise ParseError(f"unknown operation {op!r}", lineno, path)
        vals = _ints(rest, lineno, path)
        if vals[0] == vals[1]:
            raise ParseError(f"self-loop on vertex {vals[0]}", lineno, path)
        label = vals[2] if len(vals) >= 3 else 0
        sl, dl = (vals[3], vals[4]) if len(vals) == 5 else (None, None)
        groups[-1].append(EdgeUpdate(op, vals[0], vals[1], label, sl, dl))
    if separated:
        return UpdateStream([grp for grp in groups if grp])
    return UpdateStream([[u] for u in groups[0]])


def _open_lines(path) -> tuple[list[str], str]:
    with open(path, encoding="utf-8") as fh:
        return fh.readlines(), os.fspath(path)


def load_graph(path) -> LabeledGraph:
    lines, name = _open_lines(path)
    return parse_graph(lines, name)


def load_stream(path) -> UpdateStream:
    lines, name = _open_lines(path)
    return parse_stream(lines, name)


def resolve_update(g: LabeledGraph, u: EdgeUpdate) -> tuple[list[VertexUpdate], EdgeUpdate]:
    """Translate external ids of ``u`` to internal ids of ``g``.

    Unknown endpoints of an insertion that carries endpoint labels become
    vertex insertions; ids are allocated in order src, dst.
    """
    created: list[VertexUpdate] = []
    ids = []
    next_id = g.capacity
    for ext, lab in ((u.src, u.src_label), (u.dst, u.dst_label)):
        v = g.id_map.get(ext)
        if v is None:
            if u.op != INSERT or lab is None:
                raise UnknownVertexError(f"unknown vertex {ext}")
            v = next_id
            next_id += 1
            created.append(VertexUpdate(INSERT, ext, lab))
        elif lab is not None and g.labels[v] != lab:
            raise GraphError(f"vertex {ext} has label {g.labels[v]}, update says {lab}")
        ids.append(v)
    return created, EdgeUpdate(u.op, ids[0], ids[1], u.label)


# -- serialization --------------------------------------------------------------


def write_graph(g: LabeledGraph, fh: TextIO) -> None:
    ext = g.external_ids
    for v in g.vertices():
        fh.write(f"v {ext[v]} {g.labels[v]}\n")
    for a, b, lab in g.edges():
        fh.write(f"e {ext[a]} {ext[b]} {lab}\n")


def dump_graph(g: LabeledGraph, path=None) -> str | None:
    """Write ``g`` to ``path``; with no path return the text."""
    if path is None:
        buf = io.StringIO()
        write_graph(g, buf)
        return buf.getvalue()
    with open(path, "w", encoding="utf-8") as fh:
        write_graph(g, fh)
    return None


def write_stream(stream: UpdateStream, fh: TextIO, grouped: bool | None = None) -> None:
    if grouped is None:
        grouped = any(len(b) != 1 for b in stream.batches)
    for batch in stream.batches:
        for u in batch:
            line = f"{u.op} {u.src} {u.dst} {u.label}"
            if u.op == INSERT and u.src_label is not None:
                line += f" {u.src_label} {u.dst_label}"
            fh.write(line + "\n")
        if grouped:
            fh.write("--\n")   # also after the last batch, so one batch stays grouped


def dump_stream(stream: UpdateStream, path=None, grouped: bool | None = None) -> str | None:
    if path is None:
        buf = io.StringIO()
        write_stream(stream, buf, grouped)
        return buf.getvalue()
    with open(path, "w", encoding="utf-8") as fh:
        write_stream(stream, fh, grouped)
    return None


def save_id_map(g: LabeledGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v, ext in enumerate(g.external_ids):
            fh.write(f"{ext} {v}\n")


def load_id_map(path) -> dict[int, int]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = _strip(raw)
            if line:
                ext, v = _ints(line.split(), lineno, os.fspath(path))
                out[ext] = v
    return out
