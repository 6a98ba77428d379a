"""Command-line contract: exit codes, schemas, artifacts, byte stability."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from simplexwalk import io as sio
from simplexwalk.cli import main
from simplexwalk.errors import InvalidParameterError


def cfg_file(tmp_path: Path, obj, name: str = "cfg.json") -> str:
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


SIM = {
    "schema_version": 1,
    "d": 1,
    "choice": {"type": "linear", "beta": [0.5, 0.5]},
    "jump": {"type": "beta", "a": 1.0, "b": 1.0},
    "steps": 120,
    "ensemble": 400,
    "seed": 3,
    "target": {"type": "dirichlet", "alpha": [0.5, 0.5]},
}


class TestSerialization:
    def test_float_17_digits(self):
        assert sio.format_float(0.1) == "0.10000000000000001"
        assert sio.format_float(1.0) == "1"
        assert float(sio.format_float(np.pi)) == np.pi

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidParameterError):
            sio.format_float(float("nan"))
        with pytest.raises(InvalidParameterError):
            sio.canonical_json({"x": float("inf")})

    def test_keys_sorted(self):
        s = sio.canonical_json({"b": 1, "a": {"z": 0, "m": True}})
        assert s.index('"a"') < s.index('"b"') and s.index('"m"') < s.index('"z"')
        assert json.loads(s) == {"b": 1, "a": {"z": 0, "m": True}}

    def test_csv_provenance_comment(self, tmp_path):
        p = sio.write_csv(
            tmp_path / "t.csv", ["x", "y"], [[1, 0.5]], provenance={"seed": 7}
        )
        lines = p.read_text().splitlines()
        assert lines[0].startswith("# ") and json.loads(lines[0][2:]) == {"seed": 7}
        assert lines[1] == "x,y" and lines[2] == "1,0.5"

    def test_read_config_errors(self, tmp_path):
        from simplexwalk.errors import ConfigError

        with pytest.raises(ConfigError):
            sio.read_config(tmp_path / "nope.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{{{")
        with pytest.raises(ConfigError):
            sio.read_config(bad)
        arr = tmp_path / "arr.json"
        arr.write_text("[1,2]")
        with pytest.raises(ConfigError):
            sio.read_config(arr)


class TestExitCodes:
    def test_malformed_json(self, tmp_path):
        c = cfg_file(tmp_path, "this is not json")
        out = tmp_path / "out"
        assert main(["simulate", "--config", c, "--out", str(out)]) == 1
        assert not out.exists()

    def test_unknown_key_rejected(self, tmp_path):
        bad = dict(SIM)
        bad["extra_knob"] = 1
        c = cfg_file(tmp_path, bad)
        assert main(["simulate", "--config", c, "--out", str(tmp_path / "o")]) == 1

    def test_wrong_schema_version(self, tmp_path):
        bad = dict(SIM)
        bad["schema_version"] = 2
        c = cfg_file(tmp_path, bad)
        assert main(["simulate", "--config", c, "--out", str(tmp_path / "o")]) == 1

    def test_invalid_model_parameters(self, tmp_path):
        bad = dict(SIM)
        bad["choice"] = {"type": "linear", "beta": [1.0, 1.0]}
        c = cfg_file(tmp_path, bad)
        out = tmp_path / "o"
        assert main(["simulate", "--config", c, "--out", str(out)]) == 1
        assert not out.exists()

    def test_missing_config_file(self, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "gone.json")]) == 1

    def test_assert_flag_turns_breach_into_exit_3(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 1,
            "choice": {"type": "linear", "beta": [0.5, 0.5]},
            "jump": {"type": "beta", "a": 1.0, "b": 1.0},
            "candidate": {"type": "uniform"},
            "grid_points": 9,
        }
        c = cfg_file(tmp_path, cfg)
        assert main(["verify", "--config", c, "--out", str(tmp_path / "a")]) == 0
        assert main(
            ["verify", "--config", c, "--out", str(tmp_path / "b"), "--assert"]
        ) == 3
        rep = json.loads((tmp_path / "b" / "report.json").read_text())
        assert rep["passed"] is False and rep["max_residual"] > 0.05


class TestSimulate:
    def test_artifacts_and_provenance(self, tmp_path, capsys):
        c = cfg_file(tmp_path, SIM)
        out = tmp_path / "out"
        assert main(["simulate", "--config", c, "--out", str(out), "--assert"]) == 0
        captured = capsys.readouterr()
        assert captured.out == ""  # humans read stderr; stdout stays clean
        assert "KS z1" in captured.err

        summary = json.loads((out / "summary.json").read_text())
        assert summary["seed"] == 3
        assert summary["config"]["steps"] == 120
        assert summary["config"]["alpha_level"] == 0.01  # default made explicit
        assert summary["target_reports"][0]["passed"] is True

        lines = (out / "samples.csv").read_text().splitlines()
        assert lines[1] == "z1"
        assert len(lines) == 2 + SIM["ensemble"]
        # 17-significant-digit cells reparse to the exact simulated doubles
        col = np.array([float(v) for v in lines[2:]])
        assert float(sio.format_float(col.mean())) == summary["mean"][0]

    def test_d2_headers(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 2,
            "choice": {"type": "linear", "beta": [0.3, 0.3, 0.3]},
            "jump": {"type": "beta", "a": 1.0, "b": 2.0},
            "steps": 60,
            "ensemble": 50,
        }
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["simulate", "--config", c, "--out", str(out)]) == 0
        lines = (out / "samples.csv").read_text().splitlines()
        assert lines[1] == "z1,z2"
        summary = json.loads((out / "summary.json").read_text())
        assert "target_reports" not in summary

    def test_seed_override_recorded(self, tmp_path):
        c = cfg_file(tmp_path, SIM)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", c, "--out", str(a)]) == 0
        assert main(["simulate", "--config", c, "--out", str(b), "--seed", "99"]) == 0
        sa = json.loads((a / "summary.json").read_text())
        sb = json.loads((b / "summary.json").read_text())
        assert sb["seed"] == 99 and sb["config"]["seed"] == 99
        assert sa["mean"] != sb["mean"]

    def test_byte_identical_reruns_and_threads(self, tmp_path):
        c = cfg_file(tmp_path, SIM)
        outs = [tmp_path / f"r{i}" for i in range(3)]
        assert main(["simulate", "--config", c, "--out", str(outs[0])]) == 0
        assert main(["simulate", "--config", c, "--out", str(outs[1])]) == 0
        assert main(
            ["simulate", "--config", c, "--out", str(outs[2]), "--threads", "4"]
        ) == 0
        ref_csv = (outs[0] / "samples.csv").read_bytes()
        ref_sum = (outs[0] / "summary.json").read_bytes()
        for o in outs[1:]:
            assert (o / "samples.csv").read_bytes() == ref_csv
            assert (o / "summary.json").read_bytes() == ref_sum


class TestVerify:
    def test_correct_candidate_passes(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 1,
            "choice": {"type": "linear", "beta": [0.3, 0.7]},
            "jump": {"type": "beta", "a": 1.0, "b": 2.0},
            "candidate": {"type": "dirichlet", "alpha": [0.6, 1.4]},
            "grid_points": 9,
        }
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["verify", "--config", c, "--out", str(out), "--assert"]) == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["max_residual"] < 1e-6 and rep["passed"] is True

    def test_alpha_length_checked(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 2,
            "choice": {"type": "linear", "beta": [0.3, 0.3, 0.3]},
            "jump": {"type": "uniform"},
            "candidate": {"type": "dirichlet", "alpha": [0.5, 0.5]},
        }
        c = cfg_file(tmp_path, cfg)
        assert main(["verify", "--config", c, "--out", str(tmp_path / "o")]) == 1


class TestAssumptions:
    def test_certified_model(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 2,
            "choice": {"type": "constant", "p": [0.3, 0.3]},
            "jump": {"type": "beta", "a": 1.0, "b": 2.0},
            "delta": 0.01,
            "s": 0.3,
            "t": 0.6,
        }
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["assumptions", "--config", c, "--out", str(out), "--assert"]) == 0
        rep = json.loads((out / "report.json").read_text())["report"]
        assert rep["certified"] is True
        assert rep["eta"] == pytest.approx(1e-4)
        assert rep["epsilon"] == pytest.approx(0.3)

    def test_uncertifiable_model_breaches(self, tmp_path):
        cfg = {
            "schema_version": 1,
            "d": 1,
            "choice": {"type": "constant", "p": [0.5]},
            "jump": {"type": "point_mass", "v": 0.5},
            "delta": 0.01,
            "s": 0.3,
            "t": 0.6,
        }
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["assumptions", "--config", c, "--out", str(out), "--assert"]) == 3
        rep = json.loads((out / "report.json").read_text())["report"]
        assert rep["certified"] is False and rep["witnesses"]


class TestGeometryCommand:
    BASE = {
        "schema_version": 1,
        "d": 1,
        "delta": 0.005,
        "s": 0.3,
        "t": 0.6,
        "n_samples": 5000,
        "n_checks": 300,
    }

    def test_clean_pass(self, tmp_path):
        c = cfg_file(tmp_path, self.BASE)
        out = tmp_path / "out"
        assert main(["geometry", "--config", c, "--out", str(out), "--assert"]) == 0
        rep = json.loads((out / "report.json").read_text())
        assert max(rep["roundtrip_max_error"].values()) < 1e-12
        assert max(rep["jacobian_max_rel_error"].values()) < 1e-6
        assert rep["inclusions"]["violations"] == 0

    def test_shrunken_target_breaches(self, tmp_path):
        cfg = dict(self.BASE)
        cfg["target_shrink"] = 0.1
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["geometry", "--config", c, "--out", str(out), "--assert"]) == 3
        rep = json.loads((out / "report.json").read_text())
        assert rep["inclusions"]["violations"] >= 1

    def test_inadmissible_params_config_error(self, tmp_path):
        cfg = dict(self.BASE)
        cfg["s"], cfg["t"] = 0.6, 0.3
        c = cfg_file(tmp_path, cfg)
        assert main(["geometry", "--config", c, "--out", str(tmp_path / "o")]) == 1


class TestUrnCommand:
    def test_single_trajectory(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "single", "n_steps": 500,
               "seed": 4, "record_every": 10}
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["urn", "--config", c, "--out", str(out)]) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[1] == "n,z,L,R,zeta,W"
        assert len(lines) == 2 + 51  # comment + header + every 10th state
        summary = json.loads((out / "summary.json").read_text())
        assert summary["terminal"]["n"] == 501

    def test_ensemble_summary(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "ensemble", "n_runs": 60,
               "n_steps": 2000, "seed": 11, "snapshots": [500],
               "ks_threshold": 0.3}
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["urn", "--config", c, "--out", str(out), "--threads", "2"]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_runs"] == 60
        assert set(summary["median_abs_zeta_dev"]) == {"terminal", "500"}
        lines = (out / "samples.csv").read_text().splitlines()
        assert lines[1] == "z,L,R,zeta" and len(lines) == 62

    def test_coupled_single_run_writes_trajectory(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "coupled", "n_total": 3000,
               "N0": 500, "eps_band": 0.1, "seed": 31, "record_every": 100}
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["urn", "--config", c, "--out", str(out), "--assert"]) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[1] == "n,z,L,R,zeta,W,z_tilde,z_hat,sandwich_ok"
        rep = json.loads((out / "report.json").read_text())
        assert rep["runs"] == 1 and rep["violations_on_A_runs"] == 0

    def test_coupled_multi_run_report_only(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "coupled", "n_total": 2000,
               "N0": 400, "eps_band": 0.1, "seed": 31, "runs": 3,
               "record_every": 100}
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["urn", "--config", c, "--out", str(out)]) == 0
        assert not (out / "trajectory.csv").exists()
        rep = json.loads((out / "report.json").read_text())
        assert len(rep["per_run"]) == 3

    def test_frozen_default_reference(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "frozen", "eps_band": 0.1,
               "n_steps": 400, "n_chains": 2000, "seed": 77}
        c = cfg_file(tmp_path, cfg)
        out = tmp_path / "out"
        assert main(["urn", "--config", c, "--out", str(out), "--assert"]) == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["reference_beta"] == [0.6, 0.4]
        assert rep["ks"]["passed"] is True

    def test_urn_byte_identity_and_threads(self, tmp_path):
        cfg = {"schema_version": 1, "mode": "ensemble", "n_runs": 40,
               "n_steps": 800, "seed": 5, "ks_threshold": 0.5}
        c = cfg_file(tmp_path, cfg)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["urn", "--config", c, "--out", str(a)]) == 0
        assert main(["urn", "--config", c, "--out", str(b), "--threads", "5"]) == 0
        assert (a / "samples.csv").read_bytes() == (b / "samples.csv").read_bytes()
        assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()

    def test_mode_required(self, tmp_path):
        c = cfg_file(tmp_path, {"schema_version": 1, "n_steps": 10})
        assert main(["urn", "--config", c, "--out", str(tmp_path / "o")]) == 1
