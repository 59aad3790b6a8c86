import csv
import io

import pytest

from csm.cli import main
from csm.graph import load_graph, load_stream
from csm.query import load_query

from helpers import DATA


def _fixture_args(*extra):
    return ["run", "--graph", str(DATA / "example_graph.txt"), "--stream", str(DATA / "example_stream.txt"),
            "--query", str(DATA / "example_query.txt"), *extra]


def test_run_prints_the_example_matches(capsys):
    assert main(_fixture_args("--algo", "sym", "--print-matches", "--report", "/dev/null")) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["+ u0:v2 u1:v6 u2:v5 u3:v10", "- u0:v0 u1:v4 u2:v5 u3:v8"]


def test_run_writes_a_report(tmp_path):
    report = tmp_path / "out.csv"
    args = _fixture_args("--algo", "gf", "--algo", "tf", "--semantics", "iso",
                         "--report", str(report))
    assert main(args) == 0
    rows = list(csv.DictReader(io.StringIO(report.read_text())))
    assert [r["algo"] for r in rows] == ["gf", "tf"]
    assert all(r["results"] == "2" and r["status"] == "solved" for r in rows)
    assert rows[0]["query_id"] == "example_query"


def test_run_reports_capability_errors(capsys):
    assert main(_fixture_args("--algo", "dyn")) == 2
    assert "dyn" in capsys.readouterr().err


def test_parse_errors_are_reported(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("v 0 0\ne 0 0\n")
    args = ["run", "--graph", str(bad), "--stream", str(DATA / "example_stream.txt"),
            "--query", str(DATA / "example_query.txt"), "--algo", "gf"]
    assert main(args) == 2
    assert f"{bad}:2" in capsys.readouterr().err


def test_unknown_algo_is_rejected():
    with pytest.raises(SystemExit):
        main(_fixture_args("--algo", "nope"))


def test_gen_stream(tmp_path):
    init, stream = tmp_path / "init.txt", tmp_path / "stream.txt"
    assert main(["gen", "stream", "--graph", str(DATA / "example_graph.txt"), "--rate", "0.25",
                 "--mode", "suffix", "--out-graph", str(init), "--out-stream", str(stream)]) == 0
    g = load_graph(init)
    s = load_stream(stream)
    assert g.edge_count == 9
    # the last three edges of the file
    assert [(u.src, u.dst) for b in s for u in b] == [(5, 9), (5, 10), (7, 11)]


def test_gen_labels(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["gen", "labels", "--graph", str(DATA / "example_graph.txt"), "--labels", "1",
                 "--out", str(out)]) == 0
    g = load_graph(out)
    assert {g.labels[v] for v in g.vertices()} == {0} and g.edge_count == 12


def test_gen_queries_respects_seed_override(tmp_path, monkeypatch):
    def run(sub, seed):
        d = tmp_path / sub
        assert main(["gen", "queries", "--graph", str(DATA / "example_graph.txt"), "--shape", "path",
                     "--size", "3", "--count", "4", "--seed", str(seed), "--out-dir", str(d)]) == 0
        return sorted((p.name, p.read_text()) for p in d.iterdir())

    a = run("a", 1)
    assert len(a) == 4
    assert load_query(tmp_path / "a" / a[0][0]).n == 3
    monkeypatch.setenv("CSM_SEED", "1")
    assert run("b", 99) == a
