import json
from pathlib import Path

import jsonschema
import pytest

from paraquat.catalog import scenario_names
from paraquat.cli import main

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "docs" / "report_schema.json").read_text()
)


def test_no_arguments_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_run_writes_report_to_stdout(capsys):
    rc = main(["run", "flat-lhpk"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, SCHEMA)
    assert report["overall"] and report["final"]


def test_run_with_out_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["run", "flat-pqk-rotated", "--out", str(out)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "PASS" in text and "FAIL" not in text
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["scenario"] == "flat-pqk-rotated"


def test_expected_failure_scenario_exits_zero(capsys):
    assert main(["run", "sasaki-over-conformal"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["final"] and not report["overall"]


def test_genuine_failure_exits_one(tmp_path, capsys):
    doc = {
        "name": "broken",
        "description": "a definite metric cannot pass the hermitian check",
        "expect": "pass",
        "geometry": {"dim": 4, "metric": "euclidean4", "triple": "standard4"},
        "checks": [{"check": "hermitian", "tol": 1e-10}],
    }
    f = tmp_path / "broken.json"
    f.write_text(json.dumps(doc))
    assert main(["run", str(f)]) == 1


def test_unknown_scenario_exits_two(capsys):
    assert main(["run", "no-such-scenario"]) == 2
    assert "no-such-scenario" in capsys.readouterr().err


def test_unknown_check_exits_two(tmp_path, capsys):
    doc = {
        "name": "bad-check",
        "description": "",
        "expect": "pass",
        "geometry": {"dim": 4, "metric": "neutral4", "triple": "standard4"},
        "checks": [{"check": "frobnicate"}],
    }
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(doc))
    assert main(["run", str(f)]) == 2


def test_malformed_json_exits_two(tmp_path, capsys):
    f = tmp_path / "mangled.json"
    f.write_text("{not json")
    assert main(["run", str(f)]) == 2


def test_catalog_lists_shipped_scenarios(capsys):
    assert main(["catalog"]) == 0
    listed = capsys.readouterr().out.split()
    assert listed == scenario_names()
    assert len(listed) == 8


def test_explain(capsys):
    assert main(["explain", "oneill"]) == 0
    out = capsys.readouterr().out
    assert "identity:" in out
    assert main(["explain", "frobnicate"]) == 2


def test_run_options_recorded_in_environment(capsys):
    rc = main(["run", "flat-lhpk", "--seed", "42", "--points", "3", "--step", "1e-4"])
    assert rc == 0
    env = json.loads(capsys.readouterr().out)["environment"]
    assert env["seed"] == 42
    assert env["points"] == 3
    assert env["step"] == 1e-4
