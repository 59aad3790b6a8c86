import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csm.oracle import (OracleGuardError, brute_force_matches, complete_relation, match_projection,
                        oracle_delta, oracle_matches)
from csm.query import QueryGraph

from helpers import EXAMPLE_NEGATIVE, EXAMPLE_POSITIVE, load_example, random_data_graph, random_query


def test_initial_example_match():
    g, q, _ = load_example()
    assert oracle_matches(q, g) == {EXAMPLE_NEGATIVE}
    assert oracle_matches(q, g, "iso") == {EXAMPLE_NEGATIVE}


def test_single_vertex_query():
    g, _, _ = load_example()
    q = QueryGraph([3], [])
    assert oracle_matches(q, g) == {(8,), (9,), (10,), (11,)}


def test_example_deltas():
    g, q, _ = load_example()
    g1 = g.copy()
    g1.insert_edge(6, 10)
    assert oracle_delta(q, g, g1) == ({EXAMPLE_POSITIVE}, set())
    g2 = g1.copy()
    g2.delete_edge(0, 4)
    assert oracle_delta(q, g1, g2) == (set(), {EXAMPLE_NEGATIVE})
    assert oracle_delta(q, g, g) == (set(), set())


def test_complete_relation_example():
    g, q, _ = load_example()
    assert complete_relation(q, g, q.edge_index(1, 3)) == {(4, 8)}
    empty = g.copy()
    empty.delete_edge(4, 8)
    for k in range(q.edge_count):
        assert complete_relation(q, empty, k) == set()


def test_guard():
    g = random_data_graph(random.Random(0), 70, 10, 1)
    q = QueryGraph([0, 0], [(0, 1, 0)])
    with pytest.raises(OracleGuardError):
        oracle_matches(q, g)
    assert oracle_matches(q, g, guard=False)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["homo", "iso"]))
def test_matches_equal_all_assignment_filter(seed, semantics):
    rng = random.Random(seed)
    g = random_data_graph(rng, 7, 12, 2, 2)
    q = random_query(rng, rng.randint(1, 4), 2, 2, rng.choice(["tree", "sparse", "dense"]))
    assert oracle_matches(q, g, semantics) == brute_force_matches(q, g, semantics)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_single_insert_delta_is_edge_containing_matches(seed):
    rng = random.Random(seed)
    g = random_data_graph(rng, 10, 15, 2)
    q = random_query(rng, 4, 2, 1, "sparse")
    pairs = [(a, b) for a in range(10) for b in range(a + 1, 10) if not g.has_edge(a, b)]
    a, b = rng.choice(pairs)
    after = g.copy()
    after.insert_edge(a, b)
    pos, neg = oracle_delta(q, g, after)
    using = {m for m in oracle_matches(q, after)
             if any({m[x], m[y]} == {a, b} for x, y, _ in q.edges)}
    assert pos == using and neg == set()


def test_projection():
    g, q, _ = load_example()
    assert match_projection(q, oracle_matches(q, g)) == [{0}, {4}, {5}, {8}]
