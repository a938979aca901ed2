#!/usr/bin/env python3
import json

import pytest
from click.testing import CliRunner

from supercrit.cli import cli
from supercrit.scenario import list_scenarios

BUNDLED = [name for name, _, _ in list_scenarios()]


@pytest.fixture
def runner():
    return CliRunner()


def write_scenario(path, text):
    path.write_text(text)
    return str(path)


class TestValidate:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled(self, runner, name):
        result = runner.invoke(cli, ["validate", name])
        assert result.exit_code == 0, result.output
        assert f"{name}: ok" in result.output

    def test_missing_grid(self, runner, tmp_path):
        path = write_scenario(tmp_path / "bad.env", "mode=euler\nseed=1\n")
        result = runner.invoke(cli, ["validate", path])
        assert result.exit_code == 2
        assert "grid.N required for mode=euler" in result.output

    def test_unknown_scenario(self, runner):
        result = runner.invoke(cli, ["validate", "nowhere"])
        assert result.exit_code == 2
        assert "scenario not found" in result.output


class TestList:
    def test_lists_bundled(self, runner):
        result = runner.invoke(cli, ["list"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert len(lines) >= 8
        assert any(line.startswith("two-vortex-loglog") for line in lines)


class TestRun:
    @pytest.mark.parametrize("name", ["hypotheses-loglog", "hypotheses-log-table", "osgood-table-classical"])
    def test_bundled_tables(self, runner, tmp_path, name):
        out = tmp_path / name
        result = runner.invoke(cli, ["run", name, "--output", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert report["scenario"] == name
        assert report["exitCode"] == 0
        assert report["notice"]
        assert report["resolvedConfig"]["output.dir"] == str(out)
        assert all(report["checks"][check] for check in report["enforced"])
        assert (out / "resolved.env").read_text().startswith("# ")
        assert (out / "osgood.csv").exists()

    def test_stationary_euler(self, runner, tmp_path):
        out = tmp_path / "steady"
        result = runner.invoke(cli, ["run", "stationary-mode", "--output", str(out), "--seed", "3"])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert report["seed"] == 3
        assert report["records"] == 5
        header = (out / "diagnostics.csv").read_text().splitlines()[0]
        assert header.startswith("t,")
        assert (out / "omega_0000.field").exists()

    @pytest.mark.slow
    def test_inequality_sweep_spans_q(self, runner, tmp_path):
        out = tmp_path / "lab"
        result = runner.invoke(cli, ["run", "lab-inequality-loglog", "--output", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "report.json").read_text())
        assert {"refinement_stable", "no_q_trend"} <= set(report["enforced"])
        trend = report["qTrend"]
        assert trend["clamped"] == 0
        assert trend["qMax"] / trend["qMin"] >= 4.0
        assert trend["slope"] < 0.1

    def test_failed_check_exit_code(self, runner, tmp_path):
        path = write_scenario(tmp_path / "wrong.env", (
            "mode=hypotheses\n"
            "multiplier.kind=constant\n"
            "hypotheses.expect=Converges\n"
            "report.enforce=expected_verdict\n"
        ))
        out = tmp_path / "wrong"
        result = runner.invoke(cli, ["run", path, "--output", str(out)])
        assert result.exit_code == 4
        assert "check-failed" in result.output
        report = json.loads((out / "report.json").read_text())
        assert report["checks"]["expected_verdict"] is False

    def test_config_error_exit_code(self, runner, tmp_path):
        result = runner.invoke(cli, ["run", "hypotheses-loglog", "--threads", "0", "--output", str(tmp_path)])
        assert result.exit_code == 2
        assert "threads" in result.output

    def test_history(self, runner, tmp_path):
        runner.invoke(cli, ["run", "hypotheses-loglog", "--output", str(tmp_path / "h")])
        result = runner.invoke(cli, ["history", "--limit", "50"])
        assert result.exit_code == 0
        assert "hypotheses-loglog (hypotheses, seed=11): ok exit=0" in result.output


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
