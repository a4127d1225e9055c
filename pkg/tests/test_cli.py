"""Tests for configuration, scenario runs, manifests and the command line."""

import json
import os
from pathlib import Path
from unittest.mock import patch

import pandas as pd
import pytest
import yaml

from src.cli.cli import EXIT_CHECKS_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, OUT_DIR_ENV, main
from src.cli.manifest import CheckRecord, CheckRunner, RunManifest, below, within_relative
from src.cli.scenarios import run_scenario
from src.config import ScenarioConfig, ScenarioName, load_config
from src.errors import BadActionsError, ConfigParseError, ConfigValidationError
from src.utils.artifacts import ArtifactWriter

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def write_config(path: Path, payload) -> Path:
    path.write_text(yaml.safe_dump(payload))
    return path


def small_map_config() -> ScenarioConfig:
    return ScenarioConfig(
        scenario=ScenarioName.CURVATURE_MAP,
        numerics={"plaquette": 1e-3},
        geometry={"grid_size": 8},
    )


class TestLoadConfig:
    """Test configuration loading and validation."""

    def test_default_config(self):
        """Test the base config reproduces the reference numbers."""
        cfg = load_config()
        assert cfg.scenario is ScenarioName.REPRODUCE_PAPER
        assert cfg.model.d == 1.0e-6
        assert cfg.geometry.orbit_radius == 1.0e-9

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda p: p.stem)
    def test_shipped_configs_are_valid(self, path):
        """Test every config in configs/ validates."""
        assert isinstance(load_config(path), ScenarioConfig)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises ConfigParseError."""
        with pytest.raises(ConfigParseError, match="not found"):
            load_config(tmp_path / "nope.yaml")

    def test_invalid_yaml(self, tmp_path):
        """Test malformed YAML raises ConfigParseError."""
        path = tmp_path / "bad.yaml"
        path.write_text("scenario: [unclosed\n")
        with pytest.raises(ConfigParseError, match="Invalid YAML"):
            load_config(path)

    def test_not_a_mapping(self, tmp_path):
        """Test a YAML list is refused."""
        path = write_config(tmp_path / "list.yaml", ["reproduce_paper"])
        with pytest.raises(ConfigParseError, match="mapping"):
            load_config(path)

    def test_field_paths_reported(self, tmp_path):
        """Test validation errors carry the dotted field path."""
        path = write_config(
            tmp_path / "cfg.yaml",
            {"scenario": "curvature_map", "model": {"d": -1.0}, "numerics": {"samples": 1}},
        )
        with pytest.raises(ConfigValidationError) as exc_info:
            load_config(path)
        paths = [p for p, _ in exc_info.value.errors]
        assert "model.d" in paths
        assert "numerics.samples" in paths
        assert exc_info.value.code == "VALIDATION_ERROR"

    def test_unknown_key(self, tmp_path):
        """Test misspelled keys are refused."""
        path = write_config(tmp_path / "cfg.yaml", {"scenario": "berry_loop", "geometry": {"loop_radus": 1e-7}})
        with pytest.raises(ConfigValidationError, match="loop_radus"):
            load_config(path)

    def test_unknown_scenario(self, tmp_path):
        """Test an unknown scenario name is refused."""
        path = write_config(tmp_path / "cfg.yaml", {"scenario": "teleport"})
        with pytest.raises(ConfigValidationError):
            load_config(path)

    def test_populations_must_sum_to_one(self):
        """Test spin populations are checked."""
        with pytest.raises(ValueError, match="sum to 1"):
            ScenarioConfig(scenario="curvature_map", initial={"spin": {"plus": 0.5, "minus": 0.6}})

    def test_single_velocity(self):
        """Test velocity and velocity_slow are exclusive."""
        with pytest.raises(ValueError, match="not both"):
            ScenarioConfig(
                scenario="symmetry_break",
                initial={"velocity": [1e-3, 0.0], "velocity_slow": [0.5, 0.0]},
            )

    def test_si_full_dynamics_refused(self):
        """Test a full-dynamics run with the SI mass exceeds the step budget."""
        with pytest.raises(ValueError, match="timescale_ratio"):
            ScenarioConfig(scenario="symmetry_break", numerics={"timescale_ratio": None})

    def test_full_dynamics_needs_spin_moment(self):
        """Test full-dynamics scenarios refuse a decoupled spin."""
        with pytest.raises(ValueError, match="nonzero spin moment"):
            ScenarioConfig(scenario="adiabatic_sweep", model={"mu": 0.0})


class TestManifest:
    """Test fail-soft check bookkeeping."""

    def test_failing_check_does_not_stop_others(self):
        """Test an exception becomes a FAILED record with its error code."""
        runner = CheckRunner()

        def broken():
            raise BadActionsError("actions sum to 1.2")

        runner.run("broken", broken)
        runner.run("fine", lambda: below(0.5, 1.0))
        assert [r.status for r in runner.records] == ["FAILED", "PASSED"]
        assert runner.records[0].error_code == "BAD_ACTIONS"
        assert "1.2" in runner.records[0].detail

    def test_relative_tolerance(self):
        """Test within_relative compares against the expected magnitude."""
        assert within_relative(1.01, 1.0, 0.02).passed
        assert not within_relative(1.03, 1.0, 0.02).passed
        assert not within_relative(float("nan"), 1.0, 0.02).passed

    def test_duplicate_names_rejected(self):
        """Test check names must be unique."""
        record = CheckRecord(name="same", status="PASSED")
        with pytest.raises(ValueError, match="duplicate"):
            RunManifest(
                scenario="curvature_map",
                config={},
                code_version="0",
                started_at="",
                finished_at="",
                wall_clock_seconds=0.0,
                checks=[record, record],
            )


class TestArtifactWriter:
    """Test artifact output."""

    def test_json_is_sorted(self, tmp_path):
        """Test JSON keys are sorted and the file ends with a newline."""
        writer = ArtifactWriter(tmp_path)
        path = writer.json("report.json", {"b": 1, "a": 2})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")
        assert writer.written == ["report.json"]

    def test_csv_full_precision(self, tmp_path):
        """Test floats survive the CSV round trip exactly."""
        df = pd.DataFrame({"x": [0.1 + 0.2, 1.0 / 3.0]})
        path = ArtifactWriter(tmp_path / "nested").csv("table.csv", df)
        assert pd.read_csv(path, float_precision="round_trip")["x"].tolist() == df["x"].tolist()

    def test_no_temporary_files_left(self, tmp_path):
        """Test atomic writes leave only the target file."""
        ArtifactWriter(tmp_path).json("a.json", {})
        assert [p.name for p in tmp_path.iterdir()] == ["a.json"]


class TestRunScenario:
    """Test end-to-end scenario runs."""

    def test_reference_run(self, tmp_path):
        """Test the reference numbers pass and the manifest is written."""
        manifest = run_scenario(ScenarioConfig(scenario=ScenarioName.REPRODUCE_PAPER), tmp_path)
        assert not manifest.failed, [c.model_dump() for c in manifest.failed]
        assert {c.name for c in manifest.checks} >= {
            "field_magnitude",
            "curvature_closed_form",
            "curvature_plaquette",
            "curvature_agreement",
            "frequency_split",
        }
        assert manifest.artifacts == ["reference_numbers.json"]
        stored = json.loads((tmp_path / "manifest.json").read_text())
        assert stored["scenario"] == "reproduce_paper"
        numbers = json.loads((tmp_path / "reference_numbers.json").read_text())
        assert numbers["curvature_closed_form"] == pytest.approx(-1.186e-22, rel=1e-3)

    def test_curvature_map(self, tmp_path):
        """Test a small curvature map agrees with the closed form."""
        manifest = run_scenario(small_map_config(), tmp_path)
        assert [c.name for c in manifest.passed] == ["closed_form_agreement"]
        table = pd.read_csv(tmp_path / "curvature_map.csv")
        assert len(table) == 64
        assert list(table.columns) == ["x", "y", "B_curvature", "curvature_closed_form"]

    def test_deterministic_artifacts(self, tmp_path):
        """Test identical configs give byte-identical artifacts."""
        run_scenario(small_map_config(), tmp_path / "a")
        run_scenario(small_map_config(), tmp_path / "b")
        for name in ("curvature_map.csv", "curvature_map_stats.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_frequency_split(self, tmp_path):
        """Test the split report has exactly its five fields and the orbit oracle agrees."""
        cfg = load_config(CONFIG_DIR / "frequency_split.yaml")
        manifest = run_scenario(cfg, tmp_path)
        assert not manifest.failed, [c.model_dump() for c in manifest.failed]
        report = json.loads((tmp_path / "frequency_split.json").read_text())
        assert set(report) == {"radius", "nu_cw", "nu_ccw", "delta_nu", "curvature_at_r"}
        assert report["delta_nu"] == pytest.approx(-7.55e-9, rel=1e-3)

    def test_berry_loop(self, tmp_path):
        """Test loop phases, reversal and the connection integral for both bands."""
        manifest = run_scenario(load_config(CONFIG_DIR / "berry_loop.yaml"), tmp_path)
        assert not manifest.failed, [c.model_dump() for c in manifest.failed]
        records = json.loads((tmp_path / "berry_loop.json").read_text())
        assert [r["band"] for r in records] == ["+", "-"]
        for record in records:
            assert {"loop_radius", "band", "phase", "solid_angle_prediction", "difference"} <= set(record)
            assert record["loop_radius"] == pytest.approx(1e-7)
            assert record["difference"] == pytest.approx(record["phase"] - record["solid_angle_prediction"])
        assert records[0]["phase"] == pytest.approx(-records[1]["phase"], abs=1e-8)

    def test_symmetry_break_artifacts(self, tmp_path):
        """Test the three runs write full and effective trajectories."""
        cfg = ScenarioConfig(scenario=ScenarioName.SYMMETRY_BREAK, numerics={"samples": 20})
        manifest = run_scenario(cfg, tmp_path)
        assert {c.name for c in manifest.checks} == {
            "deflection_plus",
            "deflection_minus",
            "deflection_sign_flip",
            "equal_population_symmetry",
        }
        assert "deflection_minus" in {c.name for c in manifest.passed}
        for label in ("plus", "minus", "equal"):
            for kind in ("full", "effective"):
                assert (tmp_path / f"symmetry_break_{label}_{kind}.csv").exists()

    def test_failed_computation_is_reported(self, tmp_path):
        """Test an error inside a scenario becomes a failed check, not a crash."""
        with patch("src.cli.scenarios.curvature_grid", side_effect=BadActionsError("bad")):
            manifest = run_scenario(small_map_config(), tmp_path)
        assert manifest.failed[0].error_code == "BAD_ACTIONS"
        assert manifest.artifacts == []
        assert (tmp_path / "manifest.json").exists()


class TestMain:
    """Test the command-line entry point."""

    def test_validate(self, tmp_path, capsys):
        """Test validate accepts a good config."""
        assert main(["validate", str(CONFIG_DIR / "berry_loop.yaml")]) == EXIT_OK
        assert "valid berry_loop config" in capsys.readouterr().out

    def test_validate_bad_config(self, tmp_path, capsys):
        """Test validate reports errors on stderr with exit code 2."""
        path = write_config(tmp_path / "cfg.yaml", {"scenario": "berry_loop", "model": {"d": 0}})
        assert main(["validate", str(path)]) == EXIT_CONFIG_ERROR
        assert "model.d" in capsys.readouterr().err

    def test_run(self, tmp_path, capsys):
        """Test run writes into --out and prints the summary."""
        path = write_config(
            tmp_path / "cfg.yaml",
            {"scenario": "curvature_map", "numerics": {"plaquette": 1e-3}, "geometry": {"grid_size": 4}},
        )
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == EXIT_OK
        assert (out / "manifest.json").exists()
        printed = capsys.readouterr().out
        assert "✓ Passed (1)" in printed
        assert "Summary: 1 passed, 0 failed" in printed

    def test_reproduce(self, tmp_path):
        """Test reproduce runs the reference scenario."""
        assert main(["reproduce", "--out", str(tmp_path)]) == EXIT_OK
        assert (tmp_path / "reference_numbers.json").exists()

    @patch("src.cli.cli.run_scenario")
    def test_failed_checks_exit_code(self, mock_run, tmp_path, capsys):
        """Test failed checks give exit code 1 and are listed."""
        mock_run.return_value = RunManifest(
            scenario="curvature_map",
            config={},
            code_version="0",
            started_at="",
            finished_at="",
            wall_clock_seconds=0.0,
            checks=[CheckRecord(name="closed_form_agreement", status="FAILED", detail="boom", error_code="NONFINITE")],
        )
        path = write_config(tmp_path / "cfg.yaml", {"scenario": "curvature_map"})
        assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_CHECKS_FAILED
        assert "[NONFINITE] boom" in capsys.readouterr().out

    @patch("src.cli.cli.run_scenario")
    def test_output_directory_from_environment(self, mock_run, tmp_path):
        """Test the environment variable overrides the config's output_dir."""
        mock_run.return_value = RunManifest(
            scenario="reproduce_paper",
            config={},
            code_version="0",
            started_at="",
            finished_at="",
            wall_clock_seconds=0.0,
        )
        with patch.dict(os.environ, {OUT_DIR_ENV: str(tmp_path / "env")}):
            assert main(["reproduce"]) == EXIT_OK
        assert mock_run.call_args.args[1] == tmp_path / "env"

    @patch("src.cli.cli.run_scenario", side_effect=PermissionError("read-only"))
    def test_unwritable_output(self, mock_run, tmp_path, capsys):
        """Test an unwritable output directory exits with code 2."""
        assert main(["reproduce", "--out", str(tmp_path)]) == EXIT_CONFIG_ERROR
        assert "could not write artifacts" in capsys.readouterr().err
