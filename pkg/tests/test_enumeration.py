import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csm.enumeration import (BudgetExceeded, CandidateView, Counters, EnumerationConfig, GraphView,
                             MatchingOrder, OrderError, enumerate_dynamic, enumerate_matches,
                             hash_join, is_connected_order, local_candidates, verify_match)
from csm.oracle import brute_force_matches
from csm.query import QueryGraph

from helpers import EXAMPLE_NEGATIVE, EXAMPLE_POSITIVE, load_example, random_data_graph, random_query


def _homo():
    return EnumerationConfig()


def test_order_must_be_connected():
    _, q, _ = load_example()
    assert is_connected_order(q, [1, 3, 0, 2])
    assert not is_connected_order(q, [1, 2, 0, 3])
    with pytest.raises(OrderError):
        MatchingOrder(q, [0, 1, 2])
    order = MatchingOrder(q, [1, 3, 2, 0])
    assert [w for w, _, _ in order.back[3]] == [1, 2]


def test_seeded_example_match():
    g, q, _ = load_example()
    g.insert_edge(6, 10)
    order = MatchingOrder(q, [1, 3, 0, 2])
    c = Counters()
    out = enumerate_matches(q, order, GraphView(q, g), {1: 6, 3: 10}, _homo(), c)
    assert out == [EXAMPLE_POSITIVE]
    assert c.results == 1 and c.inv == c.emp + c.vis


def test_full_seed_emits_itself():
    g, q, _ = load_example()
    order = MatchingOrder(q, [0, 1, 2, 3])
    seed = dict(enumerate(EXAMPLE_NEGATIVE))
    assert enumerate_matches(q, order, GraphView(q, g), seed, _homo(), Counters()) == [EXAMPLE_NEGATIVE]


def test_seed_must_be_a_prefix():
    g, q, _ = load_example()
    with pytest.raises(OrderError):
        enumerate_matches(q, MatchingOrder(q, [0, 1, 2, 3]), GraphView(q, g), {3: 8}, _homo(),
                          Counters())


def test_dynamic_order_on_example():
    g, q, _ = load_example()
    g.insert_edge(6, 10)
    out = enumerate_dynamic(q, GraphView(q, g), {1: 6, 3: 10}, _homo(), Counters())
    assert out == [EXAMPLE_POSITIVE]


def test_dynamic_picks_empty_vertex_first():
    # star centered at 0; leaf 3 has a label no neighbor of the center carries
    g = random_data_graph(random.Random(3), 12, 30, 1)
    g.add_vertex(7)
    q = QueryGraph([0, 0, 0, 7], [(0, 1, 0), (0, 2, 0), (0, 3, 0)])
    c = Counters()
    out = enumerate_dynamic(q, GraphView(q, g), {0: 0}, _homo(), c)
    assert out == []
    assert c.emp == 1 and c.vis == 0


def test_local_candidates_example():
    g, q, _ = load_example()
    M = [0, -1, -1, -1]
    consulted = [(0, 0, q.edge_index(0, 2))]
    assert local_candidates(GraphView(q, g), M, 2, consulted) == [5]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_local_candidates_equal_nested_loops(seed):
    rng = random.Random(seed)
    g = random_data_graph(rng, 15, 45, 2, 2)
    q = random_query(rng, 4, 2, 2, "dense")
    u = rng.randrange(q.n)
    nb = q.nbrs[u]
    M = [-1] * q.n
    for w in nb:
        pool = list(g.vertices_with_label(q.labels[w]))
        if not pool:
            return
        M[w] = rng.choice(pool)
    consulted = [(w, q.edge_label(u, w), q.edge_index(u, w)) for w in nb]
    got = local_candidates(GraphView(q, g), M, u, consulted)
    want = [v for v in g.vertices() if g.labels[v] == q.labels[u]
            and all(g.edge_label(M[w], v) == lab for w, lab, _ in consulted)]
    assert got == sorted(want)


def test_local_candidates_single_neighbor_is_its_list():
    g, q, _ = load_example()
    M = [-1, -1, 5, -1]
    got = local_candidates(GraphView(q, g), M, 3, [(2, 0, q.edge_index(2, 3))])
    assert got == g.neighbors(5, 0, q.labels[3])


def test_exclusions_remove_edges():
    g, q, _ = load_example()
    order = MatchingOrder(q, [0, 1, 2, 3])
    excl = {q.edge_index(1, 3): {(4, 8)}}
    assert enumerate_matches(q, order, GraphView(q, g), None, _homo(), Counters(), excl) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["homo", "iso"]))
def test_static_and_dynamic_match_brute_force(seed, semantics):
    rng = random.Random(seed)
    g = random_data_graph(rng, 7, 12, 2)
    q = random_query(rng, rng.randint(2, 4), 2, 1, rng.choice(["tree", "sparse"]))
    cfg = EnumerationConfig(semantics)
    want = brute_force_matches(q, g, semantics)
    perm = [p for p in itertools.permutations(range(q.n)) if is_connected_order(q, list(p))]
    order = MatchingOrder(q, rng.choice(perm))
    static = enumerate_matches(q, order, GraphView(q, g), None, cfg, Counters())
    assert len(static) == len(set(static))
    assert set(static) == want
    dyn = enumerate_dynamic(q, GraphView(q, g), None, cfg, Counters(), start=order.order[0])
    assert set(dyn) == want and len(dyn) == len(want)
    for m in static:
        assert verify_match(q, g, m, cfg.injective)


def test_candidate_view_restricts():
    g, q, _ = load_example()
    cands = [set(g.vertices_with_label(lab)) for lab in q.labels]
    cands[1].discard(4)
    view = CandidateView(q, g, cands)
    assert enumerate_matches(q, MatchingOrder(q, [0, 1, 2, 3]), view, None, _homo(), Counters()) == []


def test_iso_counts_visited():
    # triangle-free path u0-u1-u2 with equal labels: homomorphisms may fold back
    g = random_data_graph(random.Random(0), 2, 1, 1)
    q = QueryGraph([0, 0, 0], [(0, 1, 0), (1, 2, 0)])
    c = Counters()
    homo = enumerate_matches(q, MatchingOrder(q, [0, 1, 2]), GraphView(q, g), None, _homo(), c)
    assert sorted(homo) == [(0, 1, 0), (1, 0, 1)]
    c = Counters()
    iso = enumerate_matches(q, MatchingOrder(q, [0, 1, 2]), GraphView(q, g), None,
                            EnumerationConfig("iso"), c)
    assert iso == [] and c.vis == 2 and c.inv == 2


def test_limit_and_deadline():
    g = random_data_graph(random.Random(0), 12, 40, 1)
    q = QueryGraph([0, 0, 0], [(0, 1, 0), (1, 2, 0)])
    out = enumerate_matches(q, MatchingOrder(q, [0, 1, 2]), GraphView(q, g), None,
                            EnumerationConfig(limit=5), Counters())
    assert len(out) == 5
    with pytest.raises(BudgetExceeded):
        enumerate_matches(q, MatchingOrder(q, [0, 1, 2]), GraphView(q, g), None,
                          EnumerationConfig(deadline=0.0, poll_interval=1), Counters())
    with pytest.raises(ValueError):
        EnumerationConfig(limit=0)
    with pytest.raises(ValueError):
        EnumerationConfig("weird")


def test_hash_join_examples():
    schema, rows = hash_join([(2, 6)], (0, 1), [(6, 10)], (1, 3))
    assert schema == (0, 1, 3) and rows == [(2, 6, 10)]
    assert hash_join([], (0, 1), [(6, 10)], (1, 3))[1] == []
    assert hash_join([(1, 2)], (0, 1), [], (1, 3))[1] == []
    _, rows = hash_join([(1, 2)], (0, 1), [(2, 1)], (1, 2), injective=True)
    assert rows == []


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=12),
       st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=12))
def test_hash_join_equals_nested_loops(left, right):
    schema, rows = hash_join(left, (0, 1), right, (1, 2))
    want = [(a, b, c) for a, b in left for b2, c in right if b == b2]
    assert schema == (0, 1, 2)
    assert sorted(rows) == sorted(want)
