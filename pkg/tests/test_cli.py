"""CLI surface tests: subcommands, exit codes, file outputs, determinism."""

import json
from pathlib import Path

import pytest

from transduction_mir.cli import main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def point_config(tmp_path):
    """A self-contained single-point config in a temp directory."""
    receptor = {
        "name": "ChR2",
        "states": ["C1", "O2", "C3"],
        "transitions": [
            {"from": "C1", "to": "O2", "rate": 1.0, "sensitive": True},
            {"from": "O2", "to": "C3", "rate": 1.0, "sensitive": False},
            {"from": "C3", "to": "C1", "rate": 1.0, "sensitive": False},
        ],
    }
    doc = {
        "receptor": receptor,
        "distribution": {"mu_bar": 1.0, "sigma_bar": 0.5, "a": 1e-5, "b": 2.0},
        "sweep": {
            "a": 1e-5,
            "b": 2.0,
            "mu_bar": {"min": 0.5, "max": 1.5, "steps": 3},
            "sigma_bar": {"min": 0.3, "max": 0.6, "steps": 2},
            "methods": ["quadrature", "series", "bounds_s2"],
            "series_k": 20,
        },
        "seed": 77,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


class TestMir:
    def test_quadrature_value(self, point_config, capsys):
        assert main(["mir", "--config", str(point_config)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "quadrature"
        assert payload["value_bits_per_s"] == pytest.approx(0.05168672092450602, rel=1e-9)

    def test_series_method(self, point_config, capsys):
        assert main(["mir", "--config", str(point_config), "--method", "series", "--series-k", "20"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["method"] == "series(20)"

    def test_discrete_method(self, point_config, capsys):
        assert main(["mir", "--config", str(point_config), "--method", "discrete", "--delta-t", "1e-3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value_bits_per_s"] == pytest.approx(0.0517332, rel=1e-4)

    def test_mc_method(self, point_config, capsys):
        assert main(["mir", "--config", str(point_config), "--method", "mc", "--mc-n", "20000", "--seed", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["stderr"] > 0

    def test_numerical_failure_exit_code(self, point_config, capsys):
        code = main(["mir", "--config", str(point_config), "--method", "discrete", "--delta-t", "0.9"])
        assert code == 3

    def test_quad_nodes_flag(self, point_config, capsys):
        assert main(["mir", "--config", str(point_config), "--quad-nodes", "64"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value_bits_per_s"] == pytest.approx(0.05168672092450602, rel=1e-9)


class TestBounds:
    def test_default_s2(self, point_config, capsys):
        assert main(["bounds", "--config", str(point_config)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["s"] == 2
        assert payload["lower_bits_per_s"] <= payload["upper_bits_per_s"]

    def test_s4(self, point_config, capsys):
        assert main(["bounds", "--config", str(point_config), "--s", "4"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["s"] == 4


class TestMoments:
    def test_table(self, point_config, capsys):
        assert main(["moments", "--config", str(point_config), "--order", "6"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["raw"][0] == 1.0
        assert len(payload["raw"]) == 7
        assert payload["central"][2] == pytest.approx(payload["sigma2"], rel=1e-10)


class TestSimulate:
    def test_estimate_and_dump(self, point_config, tmp_path, capsys):
        dump = tmp_path / "traj.tsv"
        assert (
            main(
                [
                    "simulate",
                    "--config",
                    str(point_config),
                    "--mc-n",
                    "5000",
                    "--delta-t",
                    "1e-2",
                    "--seed",
                    "9",
                    "--dump",
                    str(dump),
                ]
            )
            == 0
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["n"] == 5000
        lines = dump.read_text().splitlines()
        assert lines[0] == "step\tx\ty"
        assert len(lines) == 5001


class TestSweep:
    def test_writes_csv(self, point_config, tmp_path):
        out = tmp_path / "rows.csv"
        assert main(["sweep", "--config", str(point_config), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 7  # header + 3*2 rows

    def test_byte_identical_reruns(self, point_config, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["sweep", "--config", str(point_config), "--out", str(out1)]) == 0
        assert main(["sweep", "--config", str(point_config), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_json_format(self, point_config, tmp_path):
        out = tmp_path / "rows.json"
        assert main(["sweep", "--config", str(point_config), "--out", str(out), "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert len(payload) == 6

    def test_per_point_failure_exit_code(self, point_config, tmp_path, capsys):
        doc = json.loads(point_config.read_text())
        doc["sweep"]["methods"] = ["quadrature", "discrete"]
        doc["sweep"]["delta_t"] = 0.75
        bad = point_config.parent / "bad_points.json"
        bad.write_text(json.dumps(doc))
        out = tmp_path / "rows.csv"
        assert main(["sweep", "--config", str(bad), "--out", str(out)]) == 3
        assert "StepTooLarge" in out.read_text()

    def test_capacity_report(self, point_config, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        code = main(
            [
                "sweep",
                "--config",
                str(point_config),
                "--out",
                str(out),
                "--capacity-by",
                "mir_quadrature",
            ]
        )
        assert code == 0
        assert "capacity-achieving point" in capsys.readouterr().err


class TestConfigErrors:
    def test_missing_file(self):
        assert main(["mir", "--config", "/nonexistent/nope.json"]) == 2

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["mir", "--config", str(bad)]) == 2

    def test_bad_grid(self, point_config):
        doc = json.loads(point_config.read_text())
        doc["sweep"]["mu_bar"]["steps"] = 0
        bad = point_config.parent / "bad_grid.json"
        bad.write_text(json.dumps(doc))
        assert main(["sweep", "--config", str(bad)]) == 2

    def test_series_outside_region(self, point_config):
        doc = json.loads(point_config.read_text())
        doc["sweep"]["b"] = 2.5
        bad = point_config.parent / "bad_series.json"
        bad.write_text(json.dumps(doc))
        assert main(["sweep", "--config", str(bad)]) == 2

    def test_unknown_receptor_state(self, point_config):
        doc = json.loads(point_config.read_text())
        doc["receptor"]["transitions"][0]["to"] = "Z9"
        bad = point_config.parent / "bad_receptor.json"
        bad.write_text(json.dumps(doc))
        assert main(["mir", "--config", str(bad)]) == 2

    def test_non_numeric_fields(self, point_config):
        doc = json.loads(point_config.read_text())
        doc["seed"] = "lots"
        bad = point_config.parent / "bad_seed.json"
        bad.write_text(json.dumps(doc))
        assert main(["sweep", "--config", str(bad)]) == 2
        doc = json.loads(point_config.read_text())
        doc["sweep"]["series_k"] = "forty"
        bad.write_text(json.dumps(doc))
        assert main(["sweep", "--config", str(bad)]) == 2


class TestShippedConfigs:
    def test_point_config_runs(self, capsys):
        config = CONFIG_DIR / "chr2_point.json"
        assert main(["mir", "--config", str(config)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["value_bits_per_s"] > 0

    def test_receptor_file_reference_resolves(self, capsys):
        assert main(["bounds", "--config", str(CONFIG_DIR / "chr2_point.json")]) == 0
