#!/usr/bin/env python3
import asyncio
import json

import numpy as np
import pytest

from supercrit.config import TORUS_NOTICE
from supercrit.multipliers import OsgoodVerdict
from supercrit.reporting import build_report, format_value, write_csv, write_json, write_resolved_env
from supercrit.scenario import load_scenario
from supercrit.storage import RunStore


class TestFormatting:
    @pytest.mark.parametrize("value, expected", [
        (0.1, "0.1"),
        (np.float64(1.0) / 3.0, repr(1.0 / 3.0)),
        (True, "true"),
        (np.bool_(False), "false"),
        (np.int64(7), "7"),
        (None, ""),
        ("gamma", "gamma"),
    ])
    def test_format_value(self, value, expected):
        assert format_value(value) == expected

    def test_csv(self, tmp_path):
        path = write_csv(tmp_path / "sub" / "t.csv", [
            {"t": 0.0, "ok": True, "n": 3},
            {"t": 0.1, "ok": False},
        ])
        assert path.read_text().splitlines() == ["t,ok,n", "0.0,true,3", "0.1,false,"]

    def test_csv_explicit_columns(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", [], columns=["a", "b"])
        assert path.read_text() == "a,b\n"

    def test_json_numpy(self, tmp_path):
        path = write_json(tmp_path / "r.json", {
            "array": np.arange(3.0),
            "scalar": np.float64(2.5),
            "verdict": OsgoodVerdict.CONVERGES,
            "fits": {0.5: 1.0},
            "path": tmp_path,
        })
        data = json.loads(path.read_text())
        assert data["array"] == [0.0, 1.0, 2.0]
        assert data["scalar"] == 2.5
        assert data["verdict"] == "Converges"
        assert data["fits"] == {"0.5": 1.0}
        assert data["path"] == str(tmp_path)

    def test_json_rejects_unknown(self, tmp_path):
        with pytest.raises(TypeError, match="not JSON serializable"):
            write_json(tmp_path / "r.json", {"x": object()})

    def test_resolved_env(self, tmp_path):
        path = write_resolved_env(tmp_path / "resolved.env", {"mode": "euler", "grid.N": "64"})
        assert path.read_text() == f"# {TORUS_NOTICE}\nmode=euler\ngrid.N=64\n"

    def test_report_keys(self):
        scenario = load_scenario("hypotheses-loglog")
        report = build_report(scenario, {"checks": {"expected_verdict": True}}, 0, 0.25)
        assert report["scenario"] == "hypotheses-loglog"
        assert report["mode"] == "hypotheses"
        assert report["seed"] == 11
        assert report["notice"] == TORUS_NOTICE
        assert report["exitCode"] == 0
        assert report["resolvedConfig"]["multiplier.kind"] == "iterated_log"
        assert report["checks"] == {"expected_verdict": True}


class TestRunStore:
    def test_record_and_list(self, tmp_path):
        store = RunStore(tmp_path / "runs.db")
        scenario = load_scenario("hypotheses-loglog")

        async def exercise():
            first = await store.record_run(scenario, "ok", 0, 0.5, tmp_path / "a")
            second = await store.record_run(scenario, "check-failed", 4, 1.5, tmp_path / "b")
            return first, second, await store.get_runs(10)

        first, second, runs = asyncio.run(exercise())
        assert second > first
        assert [row["status"] for row in runs] == ["check-failed", "ok"]
        assert runs[0]["exit_code"] == 4
        assert runs[0]["seed"] == 11
        assert runs[0]["mode"] == "hypotheses"
        assert runs[1]["output_dir"] == str(tmp_path / "a")

    def test_limit(self, tmp_path):
        store = RunStore(tmp_path / "runs.db")
        scenario = load_scenario("stationary-mode")

        async def exercise():
            for _ in range(3):
                await store.record_run(scenario, "ok", 0, 0.1, tmp_path)
            return await store.get_runs(2)

        assert len(asyncio.run(exercise())) == 2

    def test_empty_store(self, tmp_path):
        assert asyncio.run(RunStore(tmp_path / "empty.db").get_runs()) == []


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
