import json
import math

import numpy as np
import pytest

from bellmd.cli import asset_path, main


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestTeleportCommand:
    def test_basis_input_summary(self, capsys, tmp_path):
        out = tmp_path / "run.json"
        code, stdout, _ = run_cli(
            capsys, "teleport", "--a-re", "1", "--b-re", "0", "--trials", "10",
            "--seed", "3", "--out", str(out),
        )
        assert code == 0
        summary = json.loads(stdout)
        assert summary["min_fidelity"] == 1.0
        assert summary["measurement_report"]["measurement_count"] == 1
        doc = json.loads(out.read_text())
        assert len(doc["transcripts"]) == 10
        manifest = json.loads((tmp_path / "run.json.manifest.json").read_text())
        assert manifest["subcommand"] == "teleport"
        assert str(out) in manifest["output_files"]

    def test_random_frequencies(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "teleport", "--random", "--seed", "7", "--trials", "100000",
        )
        assert code == 0
        freqs = json.loads(stdout)["outcome_frequencies"]
        assert all(abs(f - 0.25) <= 0.01 for f in freqs)

    def test_forced_outcome_correction(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "teleport", "--a-re", "0.6", "--b-re", "0.8",
            "--force-outcome", "2", "--trials", "1",
        )
        assert code == 0
        assert json.loads(stdout)["min_fidelity"] == 1.0

    def test_forced_outcome_written_transcripts(self, capsys, tmp_path):
        out = tmp_path / "forced.json"
        code, _, _ = run_cli(
            capsys, "teleport", "--a-re", "0.6", "--b-re", "0.8",
            "--force-outcome", "2", "--trials", "2", "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert all(t["correction_applied"] == "sigma_x" for t in doc["transcripts"])

    def test_non_normalized_input_exits_2(self, capsys):
        code, _, stderr = run_cli(capsys, "teleport", "--a-re", "1", "--b-re", "1")
        assert code == 2
        assert "norm" in stderr

    def test_bad_flag_exits_2(self, capsys):
        assert run_cli(capsys, "teleport", "--no-such-flag")[0] == 2

    def test_byte_reproducibility(self, capsys, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            code, _, _ = run_cli(
                capsys, "teleport", "--random", "--seed", "11", "--trials", "500",
                "--out", str(p),
            )
            assert code == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestChshCommand:
    def test_deterministic_max(self, capsys):
        code, stdout, _ = run_cli(capsys, "chsh", "--deterministic-max")
        assert code == 0
        assert json.loads(stdout)["chsh_value"] == 2.0

    def test_optimal_scenario_asset(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "chsh", "--scenario", str(asset_path("bell-optimal.json")),
        )
        assert code == 0
        value = json.loads(stdout)["chsh_value"]
        assert abs(value - 2.0 * math.sqrt(2.0)) <= 1e-9

    def test_model_asset_matches_quantum_table(self, capsys, tmp_path):
        out = tmp_path / "chsh.json"
        code, _, _ = run_cli(
            capsys, "chsh", "--model", str(asset_path("brans.json")), "--out", str(out),
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert abs(doc["chsh_value"] - 2.0 * math.sqrt(2.0)) <= 1e-9
        inv = 1.0 / math.sqrt(2.0)
        expected = [[inv, inv], [inv, -inv]]
        assert np.max(np.abs(np.array(doc["correlators"]) - expected)) <= 1e-9

    def test_malformed_scenario_names_field(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"alice_observables": []}')
        code, _, stderr = run_cli(capsys, "chsh", "--scenario", str(bad))
        assert code == 2
        assert "bob_observables" in stderr  # the first missing field is named

    def test_wrong_observable_count_names_field(self, capsys, tmp_path):
        from bellmd.serialize import chsh_scenario_to_doc
        from bellmd.inequalities import bell_optimal_scenario

        doc = chsh_scenario_to_doc(bell_optimal_scenario())
        doc["alice_observables"] = doc["alice_observables"][:1]
        bad = tmp_path / "bad2.json"
        bad.write_text(json.dumps(doc))
        code, _, stderr = run_cli(capsys, "chsh", "--scenario", str(bad))
        assert code == 2
        assert "alice_observables" in stderr

    def test_mode_required(self, capsys):
        assert run_cli(capsys, "chsh")[0] == 2


class TestMiCommand:
    @pytest.mark.parametrize(
        "table,expected,atol",
        [
            ("0.25,0.25,0.25,0.25", 0.0, 1e-12),
            ("0.5,0,0,0.5", 1.0, 1e-12),
            ("0.3252,0.1748,0.1748,0.3252", 0.0663, 5e-4),
        ],
    )
    def test_golden_tables(self, capsys, table, expected, atol):
        code, stdout, _ = run_cli(capsys, "mi", "--table", table)
        assert code == 0
        assert abs(json.loads(stdout)["mutual_information_bits"] - expected) <= atol

    def test_bad_sum_exits_2(self, capsys):
        code, _, stderr = run_cli(capsys, "mi", "--table", "0.5,0.5,0.5,0.5")
        assert code == 2
        assert "sums to" in stderr

    def test_model_report(self, capsys):
        code, stdout, _ = run_cli(capsys, "mi", "--model", str(asset_path("brans.json")))
        assert code == 0
        report = json.loads(stdout)
        assert abs(report["raw_bits"] - 2.0) <= 1e-9
        assert abs(report["normalized"] - 1.0) <= 1e-9


class TestKcbsCommand:
    def test_classical_min(self, capsys):
        code, stdout, _ = run_cli(capsys, "kcbs", "--classical-min")
        assert code == 0
        assert json.loads(stdout)["kcbs_value"] == -3.0

    def test_quantum_optimal(self, capsys):
        code, stdout, _ = run_cli(capsys, "kcbs", "--quantum-optimal")
        assert code == 0
        value = json.loads(stdout)["kcbs_value"]
        assert abs(value - (5.0 - 4.0 * math.sqrt(5.0))) <= 1e-9

    def test_scenario_file(self, capsys, tmp_path):
        from bellmd.inequalities import KcbsScenario, kcbs_pentagram
        from bellmd.hilbert import StateVector
        from bellmd.serialize import write_kcbs_scenario

        base = kcbs_pentagram()
        scenario = KcbsScenario(base.vectors, StateVector(base.vectors[0].astype(complex)))
        path = tmp_path / "kcbs.json"
        write_kcbs_scenario(path, scenario)
        code, stdout, _ = run_cli(capsys, "kcbs", "--scenario", str(path))
        assert code == 0
        assert json.loads(stdout)["kcbs_value"] >= -3.0

    def test_malformed_scenario_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"vectors": [[1,0,0]]}')
        code, _, stderr = run_cli(capsys, "kcbs", "--scenario", str(bad))
        assert code == 2
        assert "state" in stderr or "vectors" in stderr


class TestOptimizeCommand:
    @pytest.fixture
    def quick_config(self, tmp_path):
        path = tmp_path / "quick.cfg"
        path.write_text("restarts = 4\nmax_iterations = 1500\n")
        return path

    def test_zero_budget(self, capsys, tmp_path, quick_config):
        out_dir = tmp_path / "run"
        code, stdout, _ = run_cli(
            capsys, "optimize", "--budget", "0", "--seed", "1",
            "--config", str(quick_config), "--out-dir", str(out_dir),
        )
        assert code == 0
        assert abs(json.loads(stdout)["best_chsh"] - 2.0) <= 1e-3
        manifest = json.loads((out_dir / "manifest.json").read_text())
        written = {p.name for p in out_dir.iterdir()} - {"manifest.json"}
        referenced = {name.rsplit("/", 1)[-1] for name in manifest["output_files"]}
        assert written == referenced

    def test_target_mode_writes_model_and_report(self, capsys, tmp_path, quick_config):
        out_dir = tmp_path / "run"
        code, stdout, _ = run_cli(
            capsys, "optimize", "--target-s", "2.2", "--seed", "2",
            "--config", str(quick_config), "--out-dir", str(out_dir),
        )
        assert code == 0
        result = json.loads(stdout)
        assert result["feasible"] is True
        assert result["chsh_value"] >= 2.2 - 1e-3
        report = json.loads((out_dir / "min_cmd_report.json").read_text())
        assert report["cmd"]["raw_bits"] == pytest.approx(result["raw_bits"], abs=1e-15)
        from bellmd.serialize import read_model
        from bellmd.lhv import predict
        from bellmd.inequalities import chsh_value

        model = read_model(out_dir / "min_cmd_model.json")
        assert abs(chsh_value(predict(model)) - result["chsh_value"]) <= 1e-9

    def test_curve_mode(self, capsys, tmp_path, quick_config):
        out_dir = tmp_path / "curve"
        code, stdout, _ = run_cli(
            capsys, "optimize", "--curve", "0,2", "--seed", "1",
            "--config", str(quick_config), "--out-dir", str(out_dir),
        )
        assert code == 0
        points = json.loads(stdout)["points"]
        assert abs(points[0]["best_chsh"] - 2.0) <= 1e-3
        assert abs(points[1]["best_chsh"] - 4.0) <= 1e-3
        lines = (out_dir / "curve.csv").read_text().splitlines()
        assert lines[0] == "budget_bits,best_chsh,model_file"
        assert len(lines) == 3
        assert (out_dir / "curve_model_0.json").exists()

    def test_infeasible_target_exits_2(self, capsys, tmp_path, quick_config):
        code, _, stderr = run_cli(
            capsys, "optimize", "--target-s", "1.9", "--config", str(quick_config),
            "--out-dir", str(tmp_path / "x"),
        )
        assert code == 2
        assert "target" in stderr

    def test_env_var_config(self, capsys, tmp_path, quick_config, monkeypatch):
        monkeypatch.setenv("BELLMD_CONFIG", str(quick_config))
        out_dir = tmp_path / "env-run"
        code, stdout, _ = run_cli(
            capsys, "optimize", "--budget", "0", "--seed", "1",
            "--out-dir", str(out_dir),
        )
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["configuration"]["restarts"] == 4

    def test_tsirelson_target_certifies_small_dependence(self, capsys, tmp_path):
        # a little under 0.07 bits suffices even at the quantum maximum
        cfg = tmp_path / "mid.cfg"
        cfg.write_text("restarts = 8\nmax_iterations = 6000\n")
        out_dir = tmp_path / "tsirelson"
        code, stdout, _ = run_cli(
            capsys, "optimize", "--target-s", "2.8284", "--seed", "1",
            "--config", str(cfg), "--out-dir", str(out_dir),
        )
        assert code == 0
        result = json.loads(stdout)
        assert result["feasible"] is True
        assert result["raw_bits"] <= 0.07

    def test_byte_reproducibility_of_data_files(self, capsys, tmp_path, quick_config):
        dirs = [tmp_path / "r1", tmp_path / "r2"]
        for d in dirs:
            code, _, _ = run_cli(
                capsys, "optimize", "--budget", "0.1", "--seed", "9",
                "--config", str(quick_config), "--out-dir", str(d),
            )
            assert code == 0
        for name in ("budget_model.json", "budget_report.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


def test_version_flag(capsys):
    code, stdout, _ = run_cli(capsys, "--version")
    assert code == 0
    assert "bellmd" in stdout


def test_internal_invariant_breach_exits_3(capsys, monkeypatch):
    from bellmd.errors import InvariantError
    import bellmd.cli as cli_module

    def explode(_):
        raise InvariantError("synthetic breach")

    monkeypatch.setattr(cli_module, "mutual_information", explode)
    code, _, stderr = run_cli(capsys, "mi", "--table", "0.25,0.25,0.25,0.25")
    assert code == 3
    assert "internal error" in stderr
