import csv
import json

import pytest
from click.testing import CliRunner

from polywrap import cli
from polywrap.moves import InvariantViolation
from polywrap.trace import read_trace


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def p5_files(tmp_path, p5_points):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps({"points": [list(p) for p in p5_points]}))
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"order": [0, 4, 1, 2, 3]}))
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"order": [0, 1, 2, 4, 3]}))
    return tmp_path, pts, a, b


def _run(runner, *args, env=None):
    return runner.invoke(cli.main, [str(a) for a in args], env=env, catch_exceptions=False)


def test_transform_summary_and_trace(runner, p5_files):
    d, pts, a, b = p5_files
    res = _run(runner, "transform", "--points", pts, "--from", a, "--to", b, "--trace", d / "t.jsonl", "--summary", d / "s.json")
    assert res.exit_code == 0, res.output
    summary = json.loads((d / "s.json").read_text())
    assert {"moves", "atomic_moves", "ok"} <= set(summary)
    assert summary["ok"] is True
    assert summary["final"] == [0, 1, 2, 4, 3]
    tr = read_trace(d / "t.jsonl")
    assert len(tr.events) == summary["atomic_moves"]
    assert tr.replay("every-atomic").sigma == [0, 1, 2, 4, 3]
    res = _run(runner, "replay", "--trace", d / "t.jsonl")
    assert res.exit_code == 0 and json.loads(res.output)["ok"]


def test_transform_parse_error(runner, p5_files):
    d, pts, a, _ = p5_files
    bad = d / "bad.json"
    bad.write_text("{not json")
    res = _run(runner, "transform", "--points", pts, "--from", a, "--to", bad)
    assert res.exit_code == cli.EXIT_PARSE == 2


def test_transform_non_permutation_is_parse_error(runner, p5_files):
    d, pts, a, _ = p5_files
    bad = d / "short.json"
    bad.write_text(json.dumps({"order": [0, 1, 2]}))
    assert _run(runner, "transform", "--points", pts, "--from", a, "--to", bad).exit_code == 2


def test_transform_not_simple(runner, p5_files):
    d, pts, a, _ = p5_files
    bad = d / "cross.json"
    bad.write_text(json.dumps({"order": [0, 2, 1, 3, 4]}))
    res = _run(runner, "transform", "--points", pts, "--from", a, "--to", bad)
    assert res.exit_code == cli.EXIT_NOT_SIMPLE == 3


def test_invariant_failure_exit_code(runner, p5_files, monkeypatch):
    d, pts, a, b = p5_files

    def boom(*args, **kw):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli, "transform", boom)
    res = _run(runner, "transform", "--points", pts, "--from", a, "--to", b)
    assert res.exit_code == cli.EXIT_INVARIANT == 4


def test_env_check_level_wins(runner, p5_files, monkeypatch):
    seen = {}

    def spy(p1, p2, policy, level, lid=None):
        seen["level"] = level
        raise InvariantViolation("stop")

    monkeypatch.setattr(cli, "transform", spy)
    d, pts, a, b = p5_files
    _run(runner, "transform", "--points", pts, "--from", a, "--to", b, "--check-level", "every-atomic",
         env={"POLYWRAP_CHECK_LEVEL": "off"})
    assert seen["level"].name == "OFF"


def test_bad_env_check_level(runner, p5_files):
    d, pts, a, b = p5_files
    res = _run(runner, "transform", "--points", pts, "--from", a, "--to", b, env={"POLYWRAP_CHECK_LEVEL": "loud"})
    assert res.exit_code == 2


def test_canonical(runner, p5_files):
    d, pts, a, b = p5_files
    res = _run(runner, "canonical", "--points", pts, "--poly", b, "--lid", "0,1", "--out", d / "c.json")
    assert res.exit_code == 0, res.output
    out = json.loads((d / "c.json").read_text())
    assert out["order"] == [0, 4, 1, 2, 3]
    assert out["moves"] == 1 and out["prefix_ok"]
    assert _run(runner, "canonical", "--points", pts, "--poly", a, "--lid", "0,2").exit_code == 2
    assert _run(runner, "canonical", "--points", pts, "--poly", a, "--lid", "zero").exit_code == 2


def test_enumerate(runner, p5_files):
    d, pts, _, _ = p5_files
    res = _run(runner, "enumerate", "--points", pts)
    assert json.loads(res.output)["count"] == 4


def test_random_walk(runner, tmp_path):
    res = _run(runner, "random-walk", "--n", 10, "--steps", 15, "--seed", 3, "--trace", tmp_path / "w.jsonl", "--out", tmp_path / "w.json")
    assert res.exit_code == 0, res.output
    out = json.loads((tmp_path / "w.json").read_text())
    assert out["moves"] == 15
    tr = read_trace(tmp_path / "w.jsonl")
    tr.replay("every-atomic")


@pytest.mark.parametrize(
    "args,family",
    [
        (["--family", "pow2k", "--k", "2"], "pow2k"),
        (["--family", "random", "--n", "12", "--seed", "4"], "random"),
        (["--family", "pocketchain", "--k", "3"], "pocketchain"),
        (["--family", "quadcascade", "--n", "24"], "quadcascade"),
    ],
)
def test_gen_meta(runner, tmp_path, args, family):
    out = tmp_path / "g.json"
    res = _run(runner, "gen", *args, "--out", out)
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["meta"]["family"] == family
    assert {"params", "seed"} <= set(doc["meta"])
    assert all(len(p) == 2 for p in doc["points"])


def test_gen_missing_size(runner):
    assert _run(runner, "gen", "--family", "pow2k").exit_code == 2


def test_stats_outputs(runner, tmp_path):
    out = tmp_path / "sweep.csv"
    res = _run(runner, "stats", "--families", "quadcascade", "--sizes", "16,24,32", "--out", out)
    assert res.exit_code == 0, res.output
    rows = list(csv.DictReader(out.open()))
    assert [int(r["size"]) for r in rows] == [16, 24, 32]
    slopes = json.loads((tmp_path / "sweep.slopes.json").read_text())
    assert slopes["quadcascade"]["twangs"] > 1
    assert (tmp_path / "sweep.png").read_bytes()[:4] == b"\x89PNG"


def test_stats_empty_sweep(runner, tmp_path):
    out = tmp_path / "empty.csv"
    res = _run(runner, "stats", "--families", "quadcascade", "--sizes", "", "--out", out)
    assert res.exit_code == 0, res.output
    assert out.read_text().strip() == "family,size,twangs,moves"


def test_stats_bad_size(runner, tmp_path):
    assert _run(runner, "stats", "--sizes", "a,b", "--out", tmp_path / "x.csv").exit_code == 2


def test_render_trace_frame_count(runner, tmp_path):
    res = _run(runner, "random-walk", "--n", 10, "--steps", 10, "--seed", 1, "--trace", tmp_path / "w.jsonl")
    assert res.exit_code == 0
    twangs = sum(1 for _, _, ev in read_trace(tmp_path / "w.jsonl").events if ev.kind == "twang")
    for stride in (1, 3):
        d = tmp_path / f"frames{stride}"
        res = _run(runner, "render", "--in", tmp_path / "w.jsonl", "--svg-out", d, "--stride", stride)
        assert res.exit_code == 0, res.output
        assert len(list(d.glob("frame_*.svg"))) == twangs // stride + 1


def test_render_wrap_with_doubled_edge(runner, tmp_path, p5_points):
    doc = {"points": [list(p) for p in p5_points], "sigma": [0, 4, 1, 2, 4, 2, 3]}
    src = tmp_path / "w.json"
    src.write_text(json.dumps(doc))
    res = _run(runner, "render", "--in", src, "--svg-out", tmp_path / "out")
    assert res.exit_code == 0, res.output
    svg = (tmp_path / "out" / "frame_0000.svg").read_text()
    assert svg.count('class="edge doubled"') == 2
    assert 'class="point double-contact"' in svg


def test_render_bad_trace(runner, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"type": "event"}\n')
    assert _run(runner, "render", "--in", bad, "--svg-out", tmp_path / "o").exit_code == 2
