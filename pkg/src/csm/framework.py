"""The common incremental loop that every strategy plugs into.

For an insertion batch the graph is updated first, then the strategy's index,
then the incremental matches are enumerated.  For a deletion batch the
negative matches are enumerated while the edges are still present, then the
graph and the index are updated.

Incremental matches of a batch are split by query edge: ``dQ_k`` holds the
matches that map edge ``k`` onto an updated edge and map no later edge
``i > k`` onto an updated edge.  The pieces are disjoint and their union is
the full set of incremental matches.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .enumeration import (BudgetExceeded, Counters, EnumerationConfig, HOMOMORPHISM,
                          _edge_key)
from .graph import (DELETE, INSERT, EdgeUpdate, GraphError, LabeledGraph, MissingEdgeError,
                    UpdateStream, resolve_update)
from .query import QueryGraph

POSITIVE = "+"
NEGATIVE = "-"


class CapabilityError(Exception):
    """The strategy does not support the requested operation."""


class StepFull(Exception):
    """Internal signal: the per-update result limit was reached."""


@dataclass(frozen=True)
class Capabilities:
    edge_insert: bool = True
    edge_delete: bool = True
    vertex_insert: bool = True
    vertex_delete: bool = True
    label_update: bool = True
    batch: bool = False
    early_termination: bool = True
    cyclic_queries: bool = True

    def as_dict(self) -> dict:
        return dict(self.__dict__)


# -- delta plans -------------------------------------------------------------------------


@dataclass
class DeltaPlan:
    """Per query edge ``k``: the updated data edges that can match it."""

    sign: str
    updates: list[EdgeUpdate]
    seeds: list[list[tuple[int, int]]]          # (v for edge[k][0], v for edge[k][1])
    keys: list[set[tuple[int, int]]]            # unordered data edges in dR_k

    def exclusions(self, k: int) -> dict[int, set[tuple[int, int]]]:
        return {i: self.keys[i] for i in range(k + 1, len(self.keys)) if self.keys[i]}

    @property
    def empty(self) -> bool:
        return not any(self.seeds)

    @property
    def seed_count(self) -> int:
        return sum(len(s) for s in self.seeds)


def build_plan(q: QueryGraph, g: LabeledGraph, updates: Iterable[EdgeUpdate], sign: str) -> DeltaPlan:
    updates = list(updates)
    seeds: list[list[tuple[int, int]]] = [[] for _ in q.edges]
    keys: list[set] = [set() for _ in q.edges]
    gl = g.labels
    ql = q.labels
    for up in updates:
        a, b = up.src, up.dst
        for k, (x, y, lab) in enumerate(q.edges):
            if lab != up.label:
                continue
            hit = False
            if gl[a] == ql[x] and gl[b] == ql[y]:
                seeds[k].append((a, b))
                hit = True
            if gl[b] == ql[x] and gl[a] == ql[y]:
                seeds[k].append((b, a))
                hit = True
            if hit:
                keys[k].add(_edge_key(a, b))
    return DeltaPlan(sign, updates, seeds, keys)


def attribute_edge(q: QueryGraph, match: tuple, keys: set[tuple[int, int]]) -> int:
    """Largest query edge index mapped onto one of ``keys`` (-1 if none)."""
    best = -1
    for k, (a, b, _) in enumerate(q.edges):
        if _edge_key(match[a], match[b]) in keys:
            best = k
    return best


def normalize_batch(batch: Iterable[EdgeUpdate]) -> tuple[list[EdgeUpdate], list[EdgeUpdate]]:
    """Split a mixed batch into (deletions, insertions).

    An edge present in both halves is dropped from both.  When the same edge
    is toggled repeatedly only its net change survives.  Each half is sorted
    by endpoints so the application order is deterministic.
    """
    net: dict[tuple[int, int, int], int] = {}
    first: dict[tuple[int, int, int], EdgeUpdate] = {}
    for u in batch:
        net[u.key] = net.get(u.key, 0) + (1 if u.op == INSERT else -1)
        first.setdefault(u.key, u)
    dels, ins = [], []
    for key, n in net.items():
        if n == 0:
            continue
        u = first[key]
        if (n > 0) != (u.op == INSERT):
            u = EdgeUpdate(INSERT if n > 0 else DELETE, u.src, u.dst, u.label)
        (ins if n > 0 else dels).append(u)
    order = lambda u: (u.src, u.dst, u.label)   # noqa: E731
    return sorted(dels, key=order), sorted(ins, key=order)


# -- strategies --------------------------------------------------------------------------


class CsmStrategy:
    """Base class: an ordering rule, an optional index, and an enumerator."""

    name = "base"
    caps = Capabilities()

    def __init__(self):
        self.q: QueryGraph | None = None
        self.g: LabeledGraph | None = None
        self.cfg = EnumerationConfig()

    def prepare(self, q: QueryGraph, g: LabeledGraph, cfg: EnumerationConfig) -> None:
        if not self.caps.cyclic_queries and not q.is_tree():
            raise CapabilityError(f"{self.name} only supports tree queries")
        self.q, self.g, self.cfg = q, g, cfg
        self.generate_initial_order()
        self.build_initial_index()

    # offline
    def generate_initial_order(self) -> None:
        pass

    def build_initial_index(self) -> None:
        pass

    # online; the graph already reflects ``updates`` when this is called
    def update_index(self, updates: list[EdgeUpdate], sign: str) -> None:
        pass

    def on_vertex_added(self, v: int) -> None:
        pass

    def on_vertex_removed(self, v: int, label: int) -> None:
        pass

    def enumerate_seed(self, k: int, vx: int, vy: int, exclusions: dict, counters: Counters,
                       sink: Callable[[tuple], None]) -> None:
        raise NotImplementedError

    def delta_enumerate(self, plan: DeltaPlan, counters: Counters,
                        sink: Callable[[int, tuple], None]) -> None:
        """Evaluate every ``dQ_k`` by seeding the edge ``k`` with each tuple of ``dR_k``."""
        for k, seeds in enumerate(plan.seeds):
            if not seeds:
                continue
            excl = plan.exclusions(k)
            emit = _bind(sink, k)
            for vx, vy in seeds:
                self.enumerate_seed(k, vx, vy, excl, counters, emit)

    # introspection
    def candidate_sets(self) -> list[set[int]] | None:
        return None

    def candidates_total(self) -> int | None:
        cs = self.candidate_sets()
        return None if cs is None else sum(len(c) for c in cs)

    def snapshot(self):
        return None


def _bind(sink, k):
    return lambda m: sink(k, m)


# -- sessions --------------------------------------------------------------------------------


@dataclass
class StepResult:
    sign: str
    updates: list[EdgeUpdate]
    count: int = 0
    matches: list[tuple] = field(default_factory=list)
    by_edge: dict[int, list[tuple]] = field(default_factory=dict)
    truncated: bool = False
    seconds: float = 0.0


@dataclass
class RunOutcome:
    counters: Counters
    steps: list[StepResult]
    offline_time: float
    status: str = "solved"
    latencies: list[float] = field(default_factory=list)
    peak_cached: int | None = None
    candidates_total: int | None = None

    @property
    def positives(self) -> list[tuple]:
        return [m for s in self.steps if s.sign == POSITIVE for m in s.matches]

    @property
    def negatives(self) -> list[tuple]:
        return [m for s in self.steps if s.sign == NEGATIVE for m in s.matches]


class CsmSession:
    """Owns a data graph, a prepared strategy and the run counters.

    The graph is mutated in place.
    """

    def __init__(self, q: QueryGraph, g: LabeledGraph, strategy: CsmStrategy,
                 semantics: str = HOMOMORPHISM, limit: int | None = None,
                 time_limit: float | None = None, collect: bool = True,
                 on_step: Callable[[StepResult], None] | None = None):
        if q.edge_count == 0:
            raise ValueError("query must have at least one edge")
        if limit is not None and not strategy.caps.early_termination:
            raise CapabilityError(f"{strategy.name} cannot stop after a fixed number of results")
        self.q = q
        self.g = g
        self.strategy = strategy
        self.limit = limit
        self.collect = collect
        self.on_step = on_step
        self.counters = Counters()
        self.cfg = EnumerationConfig(semantics=semantics)
        self.time_limit = time_limit
        t0 = time.perf_counter()
        strategy.prepare(q, g, self.cfg)
        self.offline_time = time.perf_counter() - t0
        if time_limit is not None:
            self.cfg.deadline = time.monotonic() + time_limit
        self.steps: list[StepResult] = []
        self.latencies: list[float] = []

    # edges

    def process_batch(self, batch: Iterable[EdgeUpdate], external: bool = True) -> list[StepResult]:
        """Process one update batch.  Ids are external unless ``external`` is false."""
        internal = []
        for up in batch:
            if external:
                created, up = resolve_update(self.g, up)
                for vu in created:
                    self.insert_vertex(vu.label, vu.vertex)
            internal.append(up)
        dels, ins = normalize_batch(internal)
        if dels and not self.strategy.caps.edge_delete:
            raise CapabilityError(f"{self.strategy.name} does not support edge deletion")
        out = []
        for sign, part in ((NEGATIVE, dels), (POSITIVE, ins)):
            if not part:
                continue
            chunks = [part] if self.strategy.caps.batch else [[u] for u in part]
            for chunk in chunks:
                out.append(self._step(sign, chunk))
        return out

    def _step(self, sign: str, updates: list[EdgeUpdate]) -> StepResult:
        g, strat, c = self.g, self.strategy, self.counters
        res = StepResult(sign, updates)
        t_start = time.perf_counter()
        if sign == POSITIVE:
            for up in updates:
                g.insert_edge(up.src, up.dst, up.label)
            t0 = time.perf_counter()
            strat.update_index(updates, sign)
            t1 = time.perf_counter()
            c.index_time += t1 - t0
            self._enumerate(sign, updates, res)
            c.enum_time += time.perf_counter() - t1
        else:
            for up in updates:
                if not g.has_edge(up.src, up.dst, up.label):
                    raise MissingEdgeError(f"edge ({up.src}, {up.dst}, {up.label}) does not exist")
            t0 = time.perf_counter()
            self._enumerate(sign, updates, res)
            t1 = time.perf_counter()
            c.enum_time += t1 - t0
            for up in updates:
                g.delete_edge(up.src, up.dst, up.label)
            t2 = time.perf_counter()
            strat.update_index(updates, sign)
            c.index_time += time.perf_counter() - t2
        res.seconds = time.perf_counter() - t_start
        self.latencies.append(res.seconds)
        if self.cfg.deadline is not None and time.monotonic() > self.cfg.deadline:
            raise BudgetExceeded()
        if self.collect:
            self.steps.append(res)
        if self.on_step is not None:
            self.on_step(res)
        return res

    def _enumerate(self, sign, updates, res: StepResult) -> None:
        plan = build_plan(self.q, self.g, updates, sign)
        if plan.empty:
            return
        limit = self.limit
        collect = self.collect

        def sink(k, m):
            res.count += 1
            if collect:
                res.matches.append(m)
                res.by_edge.setdefault(k, []).append(m)
            if limit is not None and res.count >= limit:
                res.truncated = True
                raise StepFull()

        try:
            self.strategy.delta_enumerate(plan, self.counters, sink)
        except StepFull:
            pass

    # vertices and labels

    def insert_vertex(self, label: int, external: int | None = None) -> int:
        if not self.strategy.caps.vertex_insert:
            raise CapabilityError(f"{self.strategy.name} does not support vertex insertion")
        v = self.g.add_vertex(label, external)
        t0 = time.perf_counter()
        self.strategy.on_vertex_added(v)
        self.counters.index_time += time.perf_counter() - t0
        return v

    def delete_vertex(self, v: int) -> list[StepResult]:
        """Delete every incident edge as one batch, then the vertex itself."""
        if not self.strategy.caps.vertex_delete:
            raise CapabilityError(f"{self.strategy.name} does not support vertex deletion")
        batch = [EdgeUpdate(DELETE, v, w, lab) for w, lab in zip(self.g.adj[v], self.g.adj_labels[v])]
        out = self.process_batch(batch, external=False)
        label = self.g.labels[v]
        self.g.remove_vertex(v)
        self.strategy.on_vertex_removed(v, label)
        return out

    def relabel_vertex(self, v: int, label: int) -> list[StepResult]:
        """Vertex label update: drop the edges, change the label, reinsert the edges."""
        if not self.strategy.caps.label_update:
            raise CapabilityError(f"{self.strategy.name} does not support label updates")
        edges = list(zip(self.g.adj[v], self.g.adj_labels[v]))
        out = self.process_batch([EdgeUpdate(DELETE, v, w, lab) for w, lab in edges], external=False)
        old = self.g.labels[v]
        self.g.set_label(v, label)
        self.strategy.on_vertex_removed(v, old)
        self.strategy.on_vertex_added(v)
        out += self.process_batch([EdgeUpdate(INSERT, v, w, lab) for w, lab in edges], external=False)
        return out

    def relabel_edge(self, a: int, b: int, label: int) -> list[StepResult]:
        if not self.strategy.caps.label_update:
            raise CapabilityError(f"{self.strategy.name} does not support label updates")
        old = self.g.edge_label(a, b)
        if old is None:
            raise MissingEdgeError(f"edge ({a}, {b}) does not exist")
        return self.process_batch([EdgeUpdate(DELETE, a, b, old), EdgeUpdate(INSERT, a, b, label)],
                                  external=False)

    def outcome(self, status: str = "solved") -> RunOutcome:
        return RunOutcome(self.counters, self.steps, self.offline_time, status, self.latencies,
                          getattr(self.strategy, "peak_cached", None),
                          self.strategy.candidates_total())


def check_capabilities(stream: UpdateStream, strategy: CsmStrategy) -> None:
    for batch in stream:
        for up in batch:
            if up.op == DELETE and not strategy.caps.edge_delete:
                raise CapabilityError(f"{strategy.name} does not support edge deletion")


def run_stream(q: QueryGraph, g: LabeledGraph, stream: UpdateStream, strategy: CsmStrategy,
               semantics: str = HOMOMORPHISM, limit: int | None = None,
               time_limit: float | None = None, collect: bool = True,
               on_step: Callable[[StepResult], None] | None = None) -> RunOutcome:
    """Run ``strategy`` over ``stream``; ``g`` is updated in place.

    A run that exceeds ``time_limit`` stops early with status ``unsolved``.
    """
    check_capabilities(stream, strategy)
    session = CsmSession(q, g, strategy, semantics, limit, time_limit, collect, on_step)
    try:
        for batch in stream:
            session.process_batch(batch)
    except BudgetExceeded:
        return session.outcome("unsolved")
    return session.outcome()


def find_incremental_matches(q: QueryGraph, g: LabeledGraph, strategy: CsmStrategy,
                             plan: DeltaPlan, counters: Counters | None = None
                             ) -> dict[int, list[tuple]]:
    """``dQ_k`` for every ``k`` with a prepared strategy and a ready plan."""
    counters = counters or Counters()
    out: dict[int, list[tuple]] = {}
    strategy.delta_enumerate(plan, counters, lambda k, m: out.setdefault(k, []).append(m))
    return out


def format_match(sign: str, m: tuple, external_ids: list[int] | None = None) -> str:
    ids = m if external_ids is None else tuple(external_ids[v] for v in m)
    return sign + " " + " ".join(f"u{u}:v{v}" for u, v in enumerate(ids))
