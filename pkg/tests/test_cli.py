import csv
import json

import pytest
from typer.testing import CliRunner

from cli import app
from src.cli.checks import SewingMultiplierCheck
from src.cli.cli import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK
from src.partition.genus_one import z1_twisted_2pt

runner = CliRunner()

FAST = {"N": 8, "quad_M": 128}


@pytest.fixture
def run(tmp_path):
    """設定を書き出して CLI を呼び、(終了コード, 出力ファイルのパス) を返す。"""

    def _run(command: str, config: dict | str, fmt: str | None = None):
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(config if isinstance(config, str) else json.dumps(config))
        out_path = tmp_path / f"out.{fmt or 'json'}"
        args = [command, "--config", str(cfg_path), "--out", str(out_path)]
        if fmt is not None:
            args += ["--format", fmt]
        result = runner.invoke(app, args)
        return result.exit_code, out_path

    return _run


def test_eval_writes_json_document(run, sew, tw):
    code, out = run("eval", {"target": "z1_twisted_2pt", "parameters": FAST})
    assert code == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["schema"] == 1
    assert doc["command"] == "eval"
    value = complex(doc["result"]["value"]["re"], doc["result"]["value"]["im"])
    assert value == pytest.approx(z1_twisted_2pt(sew, tw), rel=1e-10)
    assert doc["result"]["truncation"] == {"N": 8, "quad_M": 128, "det_method": "lu"}
    assert "timing" not in doc["result"]


def test_eval_is_deterministic(run):
    config = {"target": "dedekind_eta", "parameters": FAST}
    _, out = run("eval", config)
    first = out.read_text()
    _, out = run("eval", config)
    assert out.read_text() == first


def test_eval_csv_row(run):
    code, out = run("eval", {"target": "dedekind_eta"}, fmt="csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 1
    assert {"target", "tau_re", "tau_im", "value_re", "value_im"} <= rows[0].keys()


def test_eval_rejects_unknown_target(run):
    code, out = run("eval", {"target": "no_such_target"})
    assert code == EXIT_INVALID
    assert not out.exists()


def test_eval_reports_unsewable_point(run):
    code, _ = run("eval", {"target": "z2_fermionic", "parameters": {**FAST, "rho": 0}})
    assert code == EXIT_INVALID


def test_heisenberg_partition_allows_zero_rho(run):
    code, out = run("eval", {"target": "z2_heisenberg", "parameters": {**FAST, "rho": 0}})
    assert code == EXIT_OK
    assert json.loads(out.read_text())["result"]["branch"]["sheet"] is None


@pytest.mark.parametrize(
    "config",
    [
        "{not json",
        json.dumps({"target": "z1_twisted_2pt", "parameters": {"B": 2}}),
        json.dumps({"target": "z1_twisted_2pt", "parameters": {"kappa": 0.5}}),
        json.dumps({"parameters": FAST}),
    ],
)
def test_invalid_config_exits_with_validation_code(run, config):
    code, _ = run("eval", config)
    assert code == EXIT_INVALID


def test_missing_config_file_is_a_usage_error(tmp_path):
    result = runner.invoke(app, ["eval", "--config", str(tmp_path / "missing.json")])
    assert result.exit_code == 2


def test_check_passes(run):
    code, out = run("check", {"target": "twisted_2pt_lattice", "parameters": FAST})
    assert code == EXIT_OK
    result = json.loads(out.read_text())["result"]
    assert result["passed"] is True
    assert result["residual"] < result["tolerance"]


def test_check_detects_perturbed_multiplier(run):
    params = {**FAST, "generator": "T", "chi_perturbation": 1.01}
    code, out = run("check", {"target": "invariance", "parameters": params})
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out.read_text())["result"]["passed"] is False


def test_check_rejects_unknown_name(run):
    code, _ = run("check", {"target": "z1_twisted_2pt", "parameters": FAST})
    assert code == EXIT_INVALID


def test_sweep_writes_one_row_per_point(run):
    config = {
        "target": "z1_twisted_2pt",
        "parameters": FAST,
        "axes": [{"name": "kappa", "start": -0.2, "stop": 0.2, "num": 3}],
    }
    code, out = run("sweep", config, fmt="csv")
    assert code == EXIT_OK
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [float(row["kappa"]) for row in rows] == pytest.approx([-0.2, 0.0, 0.2])
    assert all(row["error"] == "" for row in rows)


@pytest.mark.parametrize(
    "axes",
    [
        [],
        [{"name": "kappa", "start": 0.0, "stop": 0.1, "num": 0}],
        [{"name": "rho_abs", "start": -1.0, "stop": 1e-3, "num": 2, "scale": "log"}],
    ],
)
def test_sweep_rejects_empty_or_bad_grid(run, axes):
    code, _ = run("sweep", {"target": "z1_twisted_2pt", "parameters": FAST, "axes": axes})
    assert code == EXIT_INVALID


def test_sweep_keeps_going_past_failed_points(run):
    config = {
        "target": "z2_fermionic",
        "parameters": FAST,
        "axes": [{"name": "rho_abs", "start": 1e-3, "stop": 1.0, "num": 2}],
    }
    code, out = run("sweep", config)
    assert code == EXIT_CHECK_FAILED
    rows = json.loads(out.read_text())["result"]["rows"]
    assert rows[0]["error"] == ""
    assert rows[1]["error"].startswith("SewingDomainError")


def test_check_and_sweep_record_the_rho_sheet(run):
    _, out = run("eval", {"target": "z2_fermionic", "parameters": FAST})
    branch = json.loads(out.read_text())["result"]["branch"]
    assert isinstance(branch["sheet"], int)

    _, out = run("check", {"target": "twisted_2pt_lattice", "parameters": FAST})
    assert json.loads(out.read_text())["result"]["branch"] == branch

    code, out = run("check", {"target": "twisted_2pt_lattice", "parameters": FAST}, fmt="csv")
    assert code == EXIT_OK
    (row,) = csv.DictReader(out.read_text().splitlines())
    assert int(row["sheet"]) == branch["sheet"]

    config = {
        "target": "z1_twisted_2pt",
        "parameters": FAST,
        "axes": [{"name": "kappa", "start": -0.2, "stop": 0.2, "num": 2}],
    }
    _, out = run("sweep", config)
    rows = json.loads(out.read_text())["result"]["rows"]
    assert [(row["B"], row["sheet"], row["m"]) for row in rows] == [
        (branch["B"], branch["sheet"], branch["m"])
    ] * 2


@pytest.mark.parametrize(
    "trace, passed",
    [
        ([1e-8, 5e-9], True),
        ([1e-8, 1e-8], True),
        ([2e-14, 5e-14], True),
        ([1e-8, 3e-8], False),
    ],
)
def test_sewing_multiplier_requires_non_increasing_residual(trace, passed):
    check = SewingMultiplierCheck()
    assert check._passed(trace[0], trace, tolerance=1e-6) is passed
