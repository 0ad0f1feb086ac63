import json
import subprocess
import sys

import pytest

from portrait_lab.census import sqrt2_config
from portrait_lab.cli import build_parser, main
from portrait_lab.moduli import ModuliReport
from portrait_lab.survey import read_reports

VERBS = ["admissible", "ideal", "analyze", "pairs", "survey", "obstructions", "census", "two-image"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_admissible(capsys):
    assert run(capsys, "admissible", "--p", "2,1,4,3", "--d", "2")[:2] == (0, "false")
    assert run(capsys, "admissible", "--p", "1,1,2,4", "--d", "2")[:2] == (0, "true")
    code, out, _ = run(capsys, "admissible", "--p", "2,1,4,3", "--d", "1", "--json")
    assert code == 0
    assert json.loads(out) == {"portrait": "2,1,4,3", "d": 1, "admissible": True, "cycles": {"2": 2}}


def test_analyze_example(capsys):
    code, out, _ = run(capsys, "analyze", "--p", "1,1,2,4", "--q", "1,3,3,1", "--d", "2", "--json")
    assert code == 0
    report = ModuliReport.from_json(json.loads(out))
    assert report.dim >= 0
    assert report.to_line() == out
    code, out, _ = run(capsys, "analyze", "--p", "1,2,2,1", "--q", "1,1,2,4", "--d", "2")
    assert "dim          0" in out and "degree       1" in out


def test_ideal(capsys):
    code, out, _ = run(capsys, "ideal", "--p", "1,2,2,1", "--q", "1,1,2,4", "--d", "2")
    assert code == 0 and out.splitlines() == ["q4 - 3", "q3 - 2"]
    code, out, _ = run(capsys, "ideal", "--p", "3,3,4,4", "--d", "2", "--json")
    obj = json.loads(out)
    assert obj["basis"] == ["q3 + q4 - 1"] and obj["dim"] == 1 and obj["ring"] == ["q3", "q4"]


def test_pairs(capsys):
    assert run(capsys, "pairs", "--n", "4", "--d", "2", "--count")[:2] == (0, "780")
    assert run(capsys, "pairs", "--n", "4", "--d", "2", "--count", "--include-diagonal")[1] == "792"
    code, out, _ = run(capsys, "pairs", "--n", "3", "--d", "2", "--json")
    obj = json.loads(out)
    assert obj["n"] == 3 and len(obj["pairs"]) == len(set(obj["pairs"]))
    code, out, _ = run(capsys, "pairs", "--n", "3", "--d", "2")
    assert out.splitlines() == obj["pairs"]


def test_census(capsys, tmp_path):
    code, out, _ = run(capsys, "census", "--n", "3", "--json")
    assert code == 0 and json.loads(out)["counts"] == [3, 3, 21]
    assert run(capsys, "census", "--n", "4", "--d", "2")[1] == "28"
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(sqrt2_config().to_json()))
    assert run(capsys, "census", "--config", str(cfg), "--d", "2")[1] == "20"
    assert run(capsys, "census", "--n", "4")[1] == "4 4 28 220"


def test_two_image(capsys):
    code, out, _ = run(capsys, "two-image", "--partition", "1,2|3,4", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["dim"] == 1 and obj["portraits"] == 12
    assert run(capsys, "two-image", "--partition", "1,2,3|4,5,6")[1] == "dim 2\nportraits 30"


def test_obstructions(capsys):
    code, out, _ = run(capsys, "obstructions", "--n", "4", "--d", "2", "--json", "--jobs", "1")
    assert json.loads(out) == {"Interpolation": 39, "Coincidence": 67, "TwoImage": 24}
    code, out, _ = run(capsys, "obstructions", "--p", "1,1,2,2", "--q", "1,2,1,2", "--d", "2")
    assert "TwoImage" in out
    code, out, _ = run(capsys, "obstructions", "--p", "1,1,2,4", "--q", "1,1,2,4", "--d", "2", "--json")
    assert json.loads(out) == {"obstructions": []}


def test_survey_run_and_aggregate(capsys, tmp_path):
    sink = tmp_path / "s.jsonl"
    code, out, _ = run(capsys, "survey", "--n", "4", "--d", "2", "--out", str(sink), "--jobs", "1",
                       "--sample", "0.05", "--no-timing", "--json")
    assert code == 0
    agg = json.loads(out)
    assert agg["total"] == 39
    reports = read_reports(sink)
    assert len(reports) == 39 and all(r.ms is None for r in reports)
    code, out, _ = run(capsys, "survey", "aggregate", str(sink), "--table", "dims")
    assert out.splitlines()[0] == "dim,count"
    assert sum(int(line.split(",")[1]) for line in out.splitlines()[1:]) == 39
    code, again, _ = run(capsys, "survey", "aggregate", str(sink), "--json")
    assert json.loads(again) == agg
    code, out, _ = run(capsys, "survey", "--n", "4", "--d", "2", "--out", str(sink), "--jobs", "1",
                       "--sample", "0.05", "--no-timing", "--resume", "--shard", "0/2")
    assert code == 0


def test_budget_environment_flags_timeout(capsys, monkeypatch):
    monkeypatch.setenv("PORTRAIT_LAB_BUDGET_MS", "20")
    code, out, _ = run(capsys, "analyze", "--p", "1,3,4,5,6,2", "--q", "2,5,3,1,6,4", "--d", "3", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["status"] == "timeout" and obj["dim"] is None


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["pairs", "--n", "4"],
        ["pairs", "--n", "4", "--d", "2", "--bogus"],
        ["admissible", "--p", "1,9", "--d", "2"],
        ["census"],
        ["census", "--n", "3", "--config", "x.json"],
        ["survey", "aggregate"],
        ["survey", "--n", "4"],
        ["obstructions", "--p", "1,1"],
        ["survey", "--n", "4", "--d", "2", "--out", "x", "--shard", "3/2"],
        ["census", "--n", "3", "--jobs", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert main(argv) == 2
    assert capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["census", "--n", "9"],
        ["census", "--n", "4", "--d", "7"],
        ["admissible", "--p", "1,1", "--d", "-1"],
        ["analyze", "--p", "1,1", "--q", "1,2,3", "--d", "2"],
        ["survey", "aggregate", "/nonexistent/file.jsonl"],
        ["two-image", "--partition", "1,2|2,3"],
    ],
)
def test_domain_errors_exit_1(capsys, argv):
    assert main(argv) == 1
    assert "portrait-lab:" in capsys.readouterr().err


@pytest.mark.parametrize("verb", VERBS)
def test_help_for_every_verb(capsys, verb):
    assert main([verb, "--help"]) == 0
    out = capsys.readouterr().out
    assert "--json" in out and verb in out


def test_every_verb_registered():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "verb")
    assert sorted(sub.choices) == sorted(VERBS)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "portrait_lab", "census", "--n", "3", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == {"n": 3, "counts": [3, 3, 21]}
