"""CLI：stdout JSON、退出碼與設定覆蓋"""
from pathlib import Path

import orjson
import pytest
from typer.testing import CliRunner

from cli import app

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

runner = CliRunner()


def fixture(name: str) -> str:
    return str(FIXTURES / f"{name}.bish")


def invoke(*args: str, env=None):
    result = runner.invoke(app, [*args, "--quiet"], env=env)
    return result, orjson.loads(result.stdout)


def test_closure_on_reals_is_excluded_by_abs():
    result, payload = invoke("closure", fixture("reals"), "--set", "Z0", "--at", "1")
    assert result.exit_code == 0
    assert payload["ok"] is True
    [point] = payload["data"]["points"]
    assert point["verdict"] == "ExcludedBy"
    assert point["witness_fn"] == "abs(id)"


def test_closure_accepts_repeated_points():
    result, payload = invoke("closure", fixture("reals"), "--set", "Z0", "--at", "0", "--at", "2")
    assert result.exit_code == 0
    assert [p["verdict"] for p in payload["data"]["points"]] == ["InClosureSoFar", "ExcludedBy"]


def test_closure_on_finite_carrier_lists_closure():
    result, payload = invoke("closure", fixture("z4_trivial"), "--set", "C")
    assert result.exit_code == 0
    assert payload["data"]["closure"] == ["0", "1", "2", "3"]
    assert payload["data"]["family"]["exact"] is True


def test_closure_needs_points_on_infinite_carrier():
    result, payload = invoke("closure", fixture("reals"), "--set", "Z0")
    assert result.exit_code == 1
    assert payload["ok"] is False
    assert "設定錯誤" in payload["error"]
    assert payload["hint"]


def test_complement_on_reals():
    result, payload = invoke("complement", fixture("reals"), "--set", "Z0", "--at", "1")
    assert result.exit_code == 0
    [point] = payload["data"]["points"]
    assert point["verdict"] == "Member"
    assert point["open_witness"]
    assert point["inclusion"] == "Accepted"


def test_complement_on_finite_carrier():
    result, payload = invoke("complement", fixture("z4_full"), "--set", "C")
    assert result.exit_code == 0
    assert payload["data"]["complement"] == ["1", "3"]


def test_suite_output_is_byte_identical():
    first = runner.invoke(app, ["suite", fixture("z4_full"), "--quiet"])
    second = runner.invoke(app, ["suite", fixture("z4_full"), "--quiet"])
    assert first.exit_code == 0
    assert first.stdout == second.stdout
    payload = orjson.loads(first.stdout)
    assert payload["data"]["discrepancies"] == []
    assert payload["data"]["ok"] is True


def test_suite_writes_markdown(tmp_path):
    report = tmp_path / "suite.md"
    result, _ = invoke("suite", fixture("z4_trivial"), "--markdown", str(report))
    assert result.exit_code == 0
    assert report.exists()
    assert report.read_text(encoding="utf-8").strip()


def test_suite_needs_a_group():
    result, payload = invoke("suite", fixture("generated"))
    assert result.exit_code == 1
    assert payload["error"]


def test_theorem_listing():
    result = runner.invoke(app, ["theorems"])
    assert result.exit_code == 0
    names = [t["name"] for t in orjson.loads(result.stdout)]
    assert "open-subgroup-closed" in names
    assert "clopen-subgroup" in names
    assert len(names) == len(set(names))


def test_run_theorem_open_subgroup():
    result, payload = invoke("run-theorem", "open-subgroup-closed", fixture("z4_full"), "--set", "H")
    assert result.exit_code == 0
    assert payload["data"]["theorem"] == "open-subgroup-closed"
    assert len(payload["data"]["results"]) == 4


def test_run_theorem_reports_unmet_precondition():
    result, payload = invoke("run-theorem", "open-subgroup-closed", fixture("z4_trivial"), "--set", "H")
    assert result.exit_code == 1
    assert payload["ok"] is False


def test_run_theorem_clopen_subgroup():
    result, payload = invoke("run-theorem", "clopen-subgroup", fixture("z4_full"), "--set", "H", "--open", "O")
    assert result.exit_code == 0
    [report] = payload["data"]["results"]
    assert report["verdict"] == "Accepted"


def test_run_theorem_closure_neg_on_reals():
    result, payload = invoke("run-theorem", "closure-neg", fixture("reals"), "--set", "Z0")
    assert result.exit_code == 0
    [row] = payload["data"]["results"]
    assert row["verdict"] == "Accepted"


def test_unknown_theorem():
    result, payload = invoke("run-theorem", "no-such-theorem", fixture("z4_full"))
    assert result.exit_code == 1
    assert payload["ok"] is False


def test_oracle_agrees_with_engine():
    result, payload = invoke("oracle", fixture("z4_full"), "--set", "C")
    assert result.exit_code == 0
    assert payload["data"]["closure"] == ["0", "2"]
    assert all(p["verdict"] == "Accepted" for p in payload["data"]["points"])


def test_check_cert_and_morphism():
    result, payload = invoke("check-cert", fixture("z4_full"))
    assert result.exit_code == 0
    assert payload["data"]["certificates"]
    result, payload = invoke("check-morphism", fixture("z4_full"))
    assert result.exit_code == 0
    assert payload["data"]["morphisms"]


def test_emit_cert_writes_json(tmp_path):
    target = tmp_path / "certs.json"
    result, _ = invoke("check-cert", fixture("z4_full"), "--emit-cert", str(target))
    assert result.exit_code == 0
    assert orjson.loads(target.read_bytes())


@pytest.mark.parametrize("args", [["--budget", "0"], ["--precision", "0"], ["--config", "missing.yaml"]])
def test_invalid_configuration(args):
    result, payload = invoke("closure", fixture("z4_full"), "--set", "C", *args)
    assert result.exit_code == 1
    assert payload["ok"] is False


def test_environment_override():
    result, payload = invoke("closure", fixture("z4_full"), "--set", "C", env={"BISHOP_BUDGET": "0"})
    assert result.exit_code == 1
    assert "設定錯誤" in payload["error"]


def test_missing_definition_file():
    result, payload = invoke("closure", "nowhere.bish", "--set", "C")
    assert result.exit_code == 1
    assert "找不到檔案" in payload["error"]


def test_syntax_error_in_definition(tmp_path):
    broken = tmp_path / "broken.bish"
    broken.write_text("carrier Z mod 4;\nsubbase full;\nfn f = ;\n", encoding="utf-8")
    result, payload = invoke("closure", str(broken), "--set", "{0}")
    assert result.exit_code == 1
    assert payload["hint"]
