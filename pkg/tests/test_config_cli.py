import json

import pytest
from typer.testing import CliRunner

import src.config as config_module
from src.cli.app import app, exit_code_for
from src.config import Config, load_config, save_config
from src.errors import (
    AdmissibilityError,
    ArgumentError,
    ContinuationError,
    FlowAbort,
    MetricError,
    StagnationError,
    SubsolutionError,
)

runner = CliRunner()


@pytest.fixture
def config_file(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    monkeypatch.setattr(config_module, "CONFIG_FILE", path)
    monkeypatch.delenv("TRANSVERSE_THREADS", raising=False)
    return path


def test_config_from_dict_casts_and_ignores_unknown_keys():
    config = Config.from_dict({"threads": "3", "newton_tol": "1e-9", "colour": "blue"})
    assert config.threads == 3
    assert config.newton_tol == 1e-9
    assert not hasattr(config, "colour")


def test_config_round_trip(config_file):
    assert load_config() == Config()
    assert save_config(Config(seed=9, jobs=4))
    loaded = load_config()
    assert loaded.seed == 9
    assert loaded.jobs == 4


def test_corrupted_config_falls_back_to_defaults(config_file):
    config_file.write_text("{not json")
    assert load_config() == Config()


def test_thread_override_from_environment(config_file, monkeypatch):
    monkeypatch.setenv("TRANSVERSE_THREADS", "4")
    assert load_config().threads == 4
    monkeypatch.setenv("TRANSVERSE_THREADS", "many")
    assert load_config().threads == Config().threads


def test_to_solve_options():
    options = Config(newton_tol=1e-8, seed=5, max_halvings=12).to_solve_options()
    assert options.newton_tol == 1e-8
    assert options.seed == 5
    assert options.max_halvings == 12


@pytest.mark.parametrize(
    "error, code",
    [
        (ContinuationError("t-step underflow", last_good_t=0.5), 2),
        (StagnationError("no progress"), 2),
        (AdmissibilityError("left the cone"), 3),
        (FlowAbort("left the cone", step=4), 3),
        (ArgumentError("bad"), 1),
        (MetricError("not positive"), 1),
        (SubsolutionError("no subsolution"), 1),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_identities_command(tmp_path, config_file):
    result = runner.invoke(app, ["identities", "--samples", "5", "--derivative-samples", "2", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    data = json.loads((tmp_path / "identities.json").read_text())
    assert data["passed"] is True
    assert data["seed"] == 0


def test_solve_command_writes_artifacts(tmp_path, config_file):
    problem = tmp_path / "flat.conf"
    problem.write_text("n = 2\nN = 8\nfamily = monge-ampere\n")
    out = tmp_path / "out"
    result = runner.invoke(app, ["solve", str(problem), "--out", str(out)])
    assert result.exit_code == 0, result.output
    record = json.loads((out / "record.json").read_text())
    assert record["converged"] is True
    assert (out / "u.bin").exists()


def test_solve_command_missing_problem(tmp_path, config_file):
    result = runner.invoke(app, ["solve", str(tmp_path / "absent.conf")])
    assert result.exit_code == 1


def test_subsolution_command_reports_failure(tmp_path, config_file):
    problem = tmp_path / "quotient.conf"
    problem.write_text("n = 2\nN = 8\nfamily = hessian-quotient\nk = 2\nell = 1\nc = 0.4\n")
    result = runner.invoke(app, ["subsolution", str(problem), "--out", str(tmp_path)])
    assert result.exit_code == 3
    assert json.loads((tmp_path / "subsolution.json").read_text())["is_subsolution"] is False


def test_flow_command(tmp_path, config_file):
    problem = tmp_path / "flow.conf"
    problem.write_text("n = 2\nN = 8\nG = 0.05*cos(2*pi*x1)\ndt = 1e-4\nsteps = 10\n")
    result = runner.invoke(app, ["flow", str(problem), "--out", str(tmp_path / "flow")])
    assert result.exit_code == 0, result.output
    rows = (tmp_path / "flow" / "residuals.csv").read_text().splitlines()
    assert rows[0] == "step,residual"
    assert len(rows) == 12


def test_manufacture_needs_exactly_one_target(config_file):
    assert runner.invoke(app, ["manufacture"]).exit_code == 1
    assert runner.invoke(app, ["manufacture", "quotient-const", "--all"]).exit_code == 1
    assert runner.invoke(app, ["manufacture", "no-such-case"]).exit_code == 1


def test_manufacture_single_case(tmp_path, config_file):
    result = runner.invoke(app, ["manufacture", "quotient-const", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    campaign = json.loads((tmp_path / "campaign.json").read_text())
    assert [case["name"] for case in campaign["cases"]] == ["quotient-const"]


def test_settings_command(config_file):
    result = runner.invoke(app, ["settings", "--set", "seed=5", "--set", "jobs=2"])
    assert result.exit_code == 0, result.output
    saved = json.loads(config_file.read_text())
    assert saved["seed"] == 5
    assert saved["jobs"] == 2

    assert runner.invoke(app, ["settings", "--set", "colour=blue"]).exit_code == 1
    assert runner.invoke(app, ["settings", "--set", "seed=many"]).exit_code == 1
