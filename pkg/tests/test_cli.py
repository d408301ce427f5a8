import json

import pytest

from coverage_control.cli import main

BASE_SCENARIO = {
    "version": 1,
    "density": "phi2",
    "n": 3,
    "seed": 7,
    "controller": "tvd_dk",
    "hops": 1,
    "kappa": 1.0,
    "dt": 0.02,
    "t_final": 0.2,
    "init_cvt": False,
}


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(BASE_SCENARIO))
    return path


class TestRun:
    def test_writes_csv_and_summary(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "trace.csv"
        rc = main(["run", "--scenario", str(scenario_file), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,p_1x,p_1y,p_2x,p_2y,p_3x,p_3y,H,max_tracking_error,lambda_max,condition_flag"
        assert len(lines) == 12  # header + 10 steps + endpoint
        summary = json.loads((tmp_path / "trace.summary.json").read_text())
        assert summary["controller"] == "tvd_d1"
        assert summary["total_cost"] > 0
        assert "total_cost" in capsys.readouterr().out

    def test_rerun_byte_identical(self, tmp_path, scenario_file):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["run", "--scenario", str(scenario_file), "--out", str(out1)]) == 0
        assert main(["run", "--scenario", str(scenario_file), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_flag_overrides_take_precedence(self, tmp_path, scenario_file):
        out = tmp_path / "c.csv"
        rc = main(["run", "--scenario", str(scenario_file), "--out", str(out),
                   "--controller", "lloyd", "--duration", "0.1", "--dt", "0.05"])
        assert rc == 0
        assert len(out.read_text().splitlines()) == 4  # header + 2 steps + endpoint
        summary = json.loads((tmp_path / "c.summary.json").read_text())
        assert summary["controller"] == "lloyd"

    def test_bad_dt_exits_2_naming_key(self, tmp_path, capsys):
        bad = dict(BASE_SCENARIO, dt=0.0)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        rc = main(["run", "--scenario", str(path), "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "dt" in capsys.readouterr().err

    def test_unknown_key_exits_2(self, tmp_path, capsys):
        bad = dict(BASE_SCENARIO, turbo=True)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        rc = main(["run", "--scenario", str(path), "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "turbo" in capsys.readouterr().err

    def test_json_syntax_error_reports_line(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "density": "phi2",\n  oops\n}')
        rc = main(["run", "--scenario", str(path), "--out", str(tmp_path / "x.csv")])
        assert rc == 2
        assert "line 3" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path):
        rc = main(["run", "--scenario", str(tmp_path / "nope.json"),
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_outside_initial_position_exits_3(self, tmp_path, capsys):
        bad = dict(BASE_SCENARIO, n=1, initial_positions=[[99.0, 0.0]])
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        rc = main(["run", "--scenario", str(path), "--out", str(tmp_path / "x.csv")])
        assert rc == 3
        assert "simulation failed" in capsys.readouterr().err


class TestCompare:
    def test_empty_controllers_exits_2(self, tmp_path, scenario_file):
        rc = main(["compare", "--scenario", str(scenario_file), "--controllers", ""])
        assert rc == 2

    def test_table_output(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "table.csv"
        rc = main(["compare", "--scenario", str(scenario_file),
                   "--controllers", "lloyd,tvd_d0,tvd_d1,tvd_c", "--out", str(out)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "lloyd" in printed and "tvd_d1" in printed
        lines = out.read_text().splitlines()
        assert lines[0] == "controller,total_cost,peak_tracking_error,clamp_events,note"
        assert len(lines) == 5
        labels = [l.split(",")[0] for l in lines[1:]]
        assert labels == ["lloyd", "tvd_d0", "tvd_d1", "tvd_c"]

    def test_unknown_controller_exits_2(self, scenario_file, capsys):
        rc = main(["compare", "--scenario", str(scenario_file), "--controllers", "lloyd,warp9"])
        assert rc == 2
        assert "warp9" in capsys.readouterr().err

    def test_full_hop_sweep_row_count(self, tmp_path, scenario_file):
        controllers = ",".join([f"tvd_d{k}" for k in range(11)] + ["tvd_c"])
        out = tmp_path / "sweep.csv"
        rc = main(["compare", "--scenario", str(scenario_file),
                   "--controllers", controllers, "--out", str(out),
                   "--duration", "0.04"])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 13  # header + 12 controllers
        assert [l.split(",")[0] for l in lines[1:]] == \
            [f"tvd_d{k}" for k in range(11)] + ["tvd_c"]


def test_inline_density_scenario(tmp_path):
    scen = dict(BASE_SCENARIO)
    scen["density"] = {
        "floor": 1e-6,
        "components": [
            {"weight": 1.0, "scales": [1.0, 1.0],
             "path": {"type": "circular", "center": [0, 0], "radius": 2.0,
                      "angular_rate": 0.2}},
        ],
    }
    path = tmp_path / "inline.json"
    path.write_text(json.dumps(scen))
    rc = main(["run", "--scenario", str(path), "--out", str(tmp_path / "t.csv")])
    assert rc == 0
