import hashlib
import json
from pathlib import Path

import pytest

from spillplan.cli import RunConfig, main
from spillplan.scenario import demo_path, load_demo, serialize

GOLDEN = Path(__file__).parent / "golden"
DEMO = str(demo_path())


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_validate(capsys):
    assert main(["validate", DEMO]) == 0
    assert capsys.readouterr().out.startswith("ok: 12 sectors")


def test_validate_reports_violations(tmp_path, capsys):
    doc = json.loads(Path(DEMO).read_text())
    doc["physics"]["spread_rate"] = 2.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", str(bad)]) == 1
    assert "spread_rate out of [0,1]" in capsys.readouterr().err


def test_solve_text_writes_golden_tables(tmp_path, capsys):
    assert main(["solve", DEMO, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "optimal policy stabilize-disperse-stabilize" in out
    for name in ("table_stage2.txt", "table_stage1.txt"):
        assert (tmp_path / name).read_text(encoding="utf-8") == (GOLDEN / name).read_text(encoding="utf-8")
    result = json.loads((tmp_path / "solve_result.json").read_text())
    assert result["evaluations_staged"] == 11
    assert result["value"] < 0.05


def test_solve_both_machine(tmp_path, capsys):
    assert main(["solve", DEMO, "--solver", "both", "--format", "machine", "--out", str(tmp_path)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["argmin_identical"] is True
    assert record["brute"]["optimal_policy"] == record["staged"]["optimal_policy"]
    assert record["brute"]["evaluations_bruteforce"] == 24
    assert record["staged"]["evaluations_staged"] == 11
    assert "24 vs 11 evaluations" in record["summary"]
    assert (tmp_path / "solve_result.json").exists()


def test_both_needs_machine_format(capsys):
    assert main(["solve", DEMO, "--solver", "both"]) == 1
    assert "machine" in capsys.readouterr().err
    with pytest.raises(ValueError):
        RunConfig("solve", Path(DEMO), solver="both")


def test_missing_file_writes_nothing(tmp_path):
    out = tmp_path / "out"
    assert main(["solve", str(tmp_path / "nope.json"), "--out", str(out)]) == 1
    assert not out.exists()


def test_degenerate_exit_code(tmp_path, capsys):
    s = load_demo()
    s = s.replace(adjacency=tuple(e for e in s.adjacency if e[1] not in ("H2", "H3", "H5")))
    path = tmp_path / "cut.json"
    path.write_text(serialize(s))
    assert main(["solve", str(path), "--out", str(tmp_path / "o")]) == 2
    assert "degenerate" in capsys.readouterr().err


def test_explain_matches_golden(capsys):
    assert main(["explain", DEMO]) == 0
    assert capsys.readouterr().out == (GOLDEN / "backbone.txt").read_text(encoding="utf-8")


def test_explain_empty_inventory(tmp_path, capsys):
    doc = json.loads(Path(DEMO).read_text())
    doc["inventory"]["booms"] = []
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(doc))
    assert main(["explain", str(path)]) == 0
    out = capsys.readouterr().out
    assert "policy space: 1 x 2 = 2" in out
    assert out.rstrip().endswith("pruned:\n  (none)")


@pytest.mark.parametrize(
    "policy, args, files",
    [
        ("none", ["--observe-at", "2"], ["trace_none-surveil-none_blind.csv", "trace_none-surveil-none_observed.csv"]),
        ("stabilize-disperse-stabilize", [], ["trace_stabilize-disperse-stabilize_blind.csv"]),
    ],
)
def test_trace_matches_golden(tmp_path, policy, args, files):
    assert main(["trace", DEMO, "--policy", policy, "--out", str(tmp_path), *args]) == 0
    for name in files:
        text = (tmp_path / name).read_text(encoding="utf-8")
        assert text == (GOLDEN / name).read_text(encoding="utf-8")
        rows = text.splitlines()
        assert len(rows) == 26  # header + periods 0..24
        assert all(len(r.split(",")) == 12 for r in rows)


def test_trace_observed_support_is_narrower(tmp_path, capsys):
    assert main(["trace", DEMO, "--policy", "none", "--observe-at", "2", "--out", str(tmp_path)]) == 0
    assert "blind support 9 sectors, observed 5" in capsys.readouterr().out


def test_trace_without_uncertainty_is_identical(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(serialize(load_demo().replace(uncertainty_factor=0.0)))
    assert main(["trace", str(path), "--policy", "none", "--observe-at", "2", "--out", str(tmp_path)]) == 0
    blind = tmp_path / "trace_none-surveil-none_blind.csv"
    seen = tmp_path / "trace_none-surveil-none_observed.csv"
    assert blind.read_bytes() == seen.read_bytes()


def test_trace_unknown_policy_lists_names(tmp_path, capsys):
    assert main(["trace", DEMO, "--policy", "hope-surveil-pray", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "stabilize-disperse-stabilize" in err
    assert not list(tmp_path.iterdir())


def test_commands_are_deterministic_and_read_only(tmp_path):
    before = _digest(DEMO)
    for run in ("a", "b"):
        assert main(["solve", DEMO, "--out", str(tmp_path / run)]) == 0
    for name in ("solve_result.json", "table_stage1.txt", "table_stage2.txt"):
        assert _digest(tmp_path / "a" / name) == _digest(tmp_path / "b" / name)
    assert _digest(DEMO) == before
