import json
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from partint.cli import main
from partint.config import RunConfig, load_config, parse_config


def test_config_defaults_and_validation():
    c = RunConfig()
    assert c.eps == F(1, 10**6) and c.precision == 53
    for bad in ({"eps": F(0)}, {"budget": 0}, {"precision": 16}, {"precision": 64}):
        with pytest.raises(ValueError):
            RunConfig(**bad)


def test_config_file_and_precedence(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\neps = 1/1000\nbudget = 5000\nstrict = yes\n")
    c = load_config(str(p), budget=10)
    assert c.eps == F(1, 1000) and c.budget == 10 and c.strict


def test_config_errors():
    with pytest.raises(ValueError):
        parse_config("colour = blue")
    with pytest.raises(ValueError):
        parse_config("eps 3")


@given(st.fractions(min_value=F(1, 10**9), max_value=1))
def test_config_eps_roundtrip(q):
    assert parse_config(f"eps = {q.numerator}/{q.denominator}")["eps"] == q


def _json_line(out):
    return json.loads(out.strip().splitlines()[0])


def test_integrate_square(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    assert main(["integrate", "--f", "x^2", "--domain", "(0,1)", "--eps", "1e-4", "--trace", str(trace)]) == 0
    rec = _json_line(capsys.readouterr().out)
    assert F(rec["lower"]) <= F(1, 3) <= F(rec["upper"])
    lines = [json.loads(x) for x in trace.read_text().splitlines()]
    assert lines[0]["schema"] == "mimura-trace/1"
    assert {"iteration", "cells", "L", "U", "gap"} <= set(lines[1])


def test_csv_trace(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    assert main(["integrate", "--f", "x", "--domain", "(0,1)", "--eps", "1/100", "--trace", str(trace)]) == 0
    assert trace.read_text().splitlines()[0] == "iteration,cells,L,U,gap"


def test_measure_box(capsys):
    assert main(["measure", "--set", "box (0,1)x(0,1)"]) == 0
    rec = _json_line(capsys.readouterr().out)
    assert rec["inner"] == rec["outer"] == "1/1"


def test_decompose(capsys):
    assert main(["decompose", "--set", "(0,1)x(0,1)", "--scale", "2"]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert len(lines) == 17
    assert lines[-1]["summary"] and lines[-1]["measure"] == "1/1"
    assert {"cell", "measure", "stage"} == set(lines[0])


def test_verify_fatou_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "fatou", "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["summary"]["FAIL"] == 0


def test_exit_codes(capsys):
    assert main(["integrate", "--f", "x^+", "--domain", "(0,1)"]) == 2
    assert "parse error" in capsys.readouterr().err
    assert main(["integrate", "--f", "1/x", "--domain", "(0,1)", "--budget", "500", "--strict"]) == 3
    assert main(["measure", "--set", "box (0,1)", "--eps", "0"]) == 2
    assert main(["bogus"]) == 2
    assert main(["integrate", "--f", "x", "--domain", "(0,1)", "--precision", "64"]) == 2
