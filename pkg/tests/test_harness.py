import random

import pytest

from csm.algorithms import STRATEGIES
from csm.algorithms.sjtree import SJTree
from csm.graph import UpdateStream
from csm.harness import (CSV_COLUMNS, HARD_UNSOLVED, OUT_OF_MEMORY, SOLVED, UNSOLVED, RunMetrics,
                         classify_status, individual_speedup, metrics_csv, read_metrics_csv,
                         relative_performance, run_benchmark, run_one, supports)

from helpers import load_example, example_tree_query, random_data_graph, random_query, random_stream

TIMING = {"offline_ms", "index_ms", "enum_ms", "update_p99_ms"}


def test_empty_query_set_is_header_only():
    g, _, stream = load_example()
    text = metrics_csv(run_benchmark(g, stream, [], list(STRATEGIES)))
    assert text == ",".join(CSV_COLUMNS) + "\n"


def test_status_thresholds():
    assert classify_status(False, 0) == SOLVED
    assert classify_status(False, 10 ** 12) == SOLVED
    assert classify_status(True, 10 ** 9 - 1) == HARD_UNSOLVED
    assert classify_status(True, 10 ** 9) == UNSOLVED
    assert classify_status(True, 5, threshold=5) == UNSOLVED
    assert classify_status(True, 4, threshold=5) == HARD_UNSOLVED
    assert RunMetrics("q", "gf", HARD_UNSOLVED).unsolved


def test_fixture_grid_has_identical_results():
    g, q, stream = load_example()
    rows = run_benchmark(g, stream, [q, example_tree_query()], list(STRATEGIES))
    cyclic = [r for r in rows if r.query_id == q.name]
    # SJ refuses deletions, DYN and o-dyn refuse cycles
    assert {r.algo for r in cyclic} == set(STRATEGIES) - {"sj", "dyn", "o-dyn"}
    assert all(r.status == SOLVED and r.results == 2 for r in cyclic)
    assert all(r.inv == r.emp + r.vis for r in rows)
    assert g.has_edge(0, 4)  # the caller's graph is untouched


def test_random_grid_results_agree():
    rng = random.Random(12)
    g = random_data_graph(rng, 20, 40, 2)
    stream = random_stream(rng, g, 20, 1, max_batch=2)
    queries = [random_query(rng, 4, 2, 1, "tree") for _ in range(3)]
    for i, q in enumerate(queries):
        q.name = f"t{i}"
    rows = run_benchmark(g, stream, queries, list(STRATEGIES))
    for q in queries:
        got = {r.results for r in rows if r.query_id == q.name}
        assert len(got) == 1


def test_parallel_grid_equals_serial():
    rng = random.Random(3)
    g = random_data_graph(rng, 15, 30, 2)
    stream = random_stream(rng, g, 10, 1)
    queries = [random_query(rng, 3, 2, 1, "sparse") for _ in range(2)]
    queries[1].name = "other"
    serial = run_benchmark(g, stream, queries, ["gf", "sym"])
    parallel = run_benchmark(g, stream, queries, ["gf", "sym"], workers=2)
    strip = lambda rows: [(r.query_id, r.algo, r.status, r.results, r.emp, r.vis) for r in rows]  # noqa: E731
    assert strip(serial) == strip(parallel)


def test_time_limit_marks_unsolved():
    g = random_data_graph(random.Random(0), 40, 400, 1)
    q = random_query(random.Random(0), 5, 1, 1, "tree")
    stream = random_stream(random.Random(1), g, 30, 1, p_insert=1.0)
    row = run_one(q, g, stream, "gf", time_limit=0.0)
    assert row.status in (UNSOLVED, HARD_UNSOLVED)


def test_max_results_gives_response_time_mode():
    g, q, stream = load_example()
    row = run_one(q, g, stream, "sym", max_results=1)
    assert row.status == SOLVED and row.results == 2


def test_out_of_memory_is_a_status():
    g = random_data_graph(random.Random(0), 30, 120, 1)
    q = random_query(random.Random(0), 4, 1, 1, "tree")
    row = run_one(q, g, UpdateStream([]), "sj", strategy=SJTree(memory_cap=10))
    assert row.status == OUT_OF_MEMORY


def test_supports():
    g, q, stream = load_example()
    assert not supports("dyn", q, stream)
    assert not supports("sj", example_tree_query(), stream)
    assert supports("sj", example_tree_query(), UpdateStream([]))
    assert supports("sym", q, stream)


def test_csv_round_trip_and_determinism():
    g, q, stream = load_example()
    a = run_benchmark(g, stream, [q], ["gf", "tf", "sym"])
    b = run_benchmark(g, stream, [q], ["gf", "tf", "sym"])
    keep = [i for i, c in enumerate(CSV_COLUMNS) if c not in TIMING]

    def stable(text):
        return [[cell for i, cell in enumerate(line.split(",")) if i in keep]
                for line in text.splitlines()]

    assert stable(metrics_csv(a)) == stable(metrics_csv(b))
    back = read_metrics_csv(metrics_csv(a))
    assert [(r.query_id, r.algo, r.status, r.results, r.candidates_total) for r in back] == \
        [(r.query_id, r.algo, r.status, r.results, r.candidates_total) for r in a]


def test_individual_speedup():
    t = {"q1": 2.0, "q2": 5.0}
    assert individual_speedup(t, t) == 1.0
    assert individual_speedup(t, {k: 2 * v for k, v in t.items()}) == 2.0
    # (6/2 + 5/5 + 1/4) / 3
    a = {"q1": 2.0, "q2": 5.0, "q3": 4.0}
    b = {"q1": 6.0, "q2": 5.0, "q3": 1.0}
    assert individual_speedup(a, b) == pytest.approx(4.25 / 3)
    assert individual_speedup(a, b, ["q1"]) == 3.0
    with pytest.raises(ValueError):
        individual_speedup({}, {})


def test_relative_performance():
    assert relative_performance({"a": {"q": 3.0, "r": 1.0}}) == {"a": 1.0}
    half = relative_performance({"a": {"q": 2.0, "r": 4.0}, "b": {"q": 1.0, "r": 2.0}})
    assert half == {"a": 1.0, "b": 0.5}
    table = {"a": {"q": 10.0, "r": 2.0}, "b": {"q": 5.0, "r": 8.0}}
    got = relative_performance(table)
    assert got["a"] == pytest.approx((1.0 + 0.25) / 2)
    assert got["b"] == pytest.approx((0.5 + 1.0) / 2)
