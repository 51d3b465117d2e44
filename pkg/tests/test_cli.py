"""Command-line interface: flag parsing, config merging, outputs, exit codes."""

import csv
import json

import pytest

from relotto.cli import main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCycleCommand:
    def test_engine_mode_adiabatic(self, capsys):
        code, doc = run_json(capsys, [
            "cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c", "0.2",
            "--beta-h", "0.05", "--v", "0", "--lambda", "1"])
        assert code == 0
        assert doc["result"]["mode"] == "engine"
        assert doc["result"]["eta"] == pytest.approx(0.5, rel=1e-12)
        assert doc["config"]["omega-c"] == 1.0

    def test_non_engine_exit_code(self, capsys):
        # reversed temperature bias cannot run as an engine
        code, doc = run_json(capsys, [
            "cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c", "5",
            "--beta-h", "0.01", "--v", "0", "--lambda", "3.5"])
        assert code == 2
        assert doc["result"]["mode"] == "non_engine"
        assert doc["result"]["eta"] is None
        assert doc["result"]["w_ext"] < 0.0

    def test_lambda_protocol_routing_matches_explicit(self, capsys):
        base = ["cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c", "0.2",
                "--beta-h", "0.05", "--v", "0.9"]
        code1, doc1 = run_json(capsys, base + ["--lambda", "1.25"])
        code2, doc2 = run_json(capsys, base + ["--lambda-protocol", "sudden"])
        assert code1 == code2 == 0
        assert doc1["result"] == doc2["result"]
        assert doc2["lambda_used"] == 1.25

    def test_lambda_protocol_ramp(self, capsys):
        code, doc = run_json(capsys, [
            "cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c", "0.2",
            "--beta-h", "0.05", "--v", "0.5", "--lambda-protocol",
            "linear_omega", "--duration", "50"])
        assert code == 0
        assert 1.0 <= doc["lambda_used"] < 1.001

    def test_invalid_speed_names_flag(self, capsys):
        code = main(["cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c",
                     "0.2", "--beta-h", "0.1", "--v", "1.2", "--lambda", "1"])
        err = capsys.readouterr().err
        assert code == 1
        assert err.startswith("error:") and "v" in err

    def test_missing_flag(self, capsys):
        code = main(["cycle", "--omega-c", "1"])
        err = capsys.readouterr().err
        assert code == 1 and "omega-h" in err

    def test_both_lambda_sources_rejected(self, capsys):
        code = main(["cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c",
                     "0.2", "--beta-h", "0.05", "--v", "0", "--lambda", "1",
                     "--lambda-protocol", "sudden"])
        assert code == 1

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "omega-c": 1.0, "omega-h": 2.0, "beta-c": 0.2, "beta-h": 0.05,
            "v": 0.0, "lambda": 1.0}))
        code, doc = run_json(capsys, ["cycle", "--config", str(cfg)])
        assert code == 0 and doc["result"]["eta"] == pytest.approx(0.5)
        # flag overrides the file value
        code, doc = run_json(capsys, [
            "cycle", "--config", str(cfg), "--omega-h", "3"])
        assert doc["result"]["eta"] == pytest.approx(2.0 / 3.0)
        assert doc["config"]["omega-h"] == 3.0

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"omega-c": 1.0, "spin": 2}))
        assert main(["cycle", "--config", str(cfg)]) == 1

    def test_output_round_trip(self, tmp_path, capsys):
        out1 = tmp_path / "a.json"
        argv = ["cycle", "--omega-c", "1", "--omega-h", "2", "--beta-c", "0.2",
                "--beta-h", "0.05", "--v", "0.3", "--lambda", "1.1",
                "--output", str(out1)]
        assert main(argv) == 0
        # the emitted document doubles as a config file
        out2 = tmp_path / "b.json"
        assert main(["cycle", "--config", str(out1), "--output", str(out2)]) == 0
        assert json.loads(out1.read_text()) == json.loads(out2.read_text())


class TestBoundsCommand:
    def test_anchors(self, capsys):
        code, doc = run_json(capsys, ["bounds", "--tau", "0.5", "--v", "0.85"])
        assert code == 0
        assert doc["result"]["eta_gen_carnot"] == pytest.approx(0.6108, abs=0.002)
        code, doc = run_json(capsys, ["bounds", "--tau", "0.25", "--v", "0.9"])
        assert doc["result"]["eta_ss_upper"] == pytest.approx(0.24369, abs=1e-4)

    def test_bad_tau(self, capsys):
        assert main(["bounds", "--tau", "1.5", "--v", "0.5"]) == 1


class TestLambdaCommand:
    def test_sudden(self, capsys):
        code, doc = run_json(capsys, [
            "lambda", "--protocol", "sudden", "--omega-c", "1", "--omega-h", "2"])
        assert code == 0
        assert doc["result"]["lambda"] == 1.25
        assert doc["result"]["method"] == "closed-form"

    def test_ramp_reports_statistics(self, capsys):
        code, doc = run_json(capsys, [
            "lambda", "--protocol", "linear_omega", "--omega-c", "1",
            "--omega-h", "2", "--duration", "10"])
        assert code == 0
        res = doc["result"]
        assert res["lambda"] >= 1.0 - 1e-9
        assert res["steps"] > 0 and res["wronskian_drift"] < 1e-9

    def test_csv_protocol(self, tmp_path, capsys):
        path = tmp_path / "ramp.csv"
        rows = [(i * 0.5, 1.0 + 0.1 * i * 0.5) for i in range(21)]
        path.write_text("t,omega\n" + "".join(f"{t},{w}\n" for t, w in rows))
        code, doc = run_json(capsys, ["lambda", "--protocol", str(path)])
        assert code == 0
        assert doc["result"]["omega_end"] == pytest.approx(2.0)

    def test_unknown_protocol(self, capsys):
        assert main(["lambda", "--protocol", "warp", "--omega-c", "1",
                     "--omega-h", "2"]) == 1

    def test_ramp_requires_duration(self, capsys):
        assert main(["lambda", "--protocol", "linear_omega", "--omega-c", "1",
                     "--omega-h", "2"]) == 1


class TestSweepCommand:
    def test_threshold_crossing(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--tau", "0.5", "--v", "0.9", "--z-grid",
                     "0.05:0.95:0.01", "--regime", "adiabatic",
                     "--output", str(out)])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        crossing = None
        for prev, cur in zip(rows, rows[1:]):
            if float(prev["w_ext"]) < 0.0 <= float(cur["w_ext"]):
                crossing = (float(prev["z"]), float(cur["z"]))
        assert crossing is not None
        assert crossing[0] <= 0.356514 <= crossing[1] + 1e-12
        manifest = json.loads((tmp_path / "sweep.manifest.json").read_text())
        assert manifest["config"]["regime"] == "adiabatic"

    def test_preset_multi_speed(self, tmp_path, capsys):
        out = tmp_path / "fig2.csv"
        assert main(["sweep", "--preset", "fig2", "--output", str(out)]) == 0
        rows = list(csv.DictReader(out.open()))
        speeds = sorted({row["v"] for row in rows})
        assert len(speeds) == 4

    def test_bad_grid(self, capsys):
        assert main(["sweep", "--tau", "0.5", "--v", "0.9", "--z-grid",
                     "nonsense", "--output", "x.csv"]) == 1


class TestEnsembleCommands:
    def test_scatter_manifest(self, tmp_path, capsys):
        out = tmp_path / "sc.csv"
        code = main(["scatter", "--preset", "fig3", "--count", "20000",
                     "--output", str(out)])
        assert code == 0
        manifest = json.loads((tmp_path / "sc.manifest.json").read_text())
        assert manifest["violations"] == 0
        assert manifest["config"]["preset"] == "fig3"
        assert manifest["config"]["count"] == 20000
        header = out.read_text().splitlines()[0]
        assert header == "omega_c,omega_h,w_ext,eta"

    def test_hist_manifest_and_bins(self, tmp_path, capsys):
        out = tmp_path / "h.csv"
        code = main(["hist", "--preset", "fig5", "--count", "30000",
                     "--bins", "25", "--output", str(out)])
        assert code == 0
        manifest = json.loads((tmp_path / "h.manifest.json").read_text())
        assert manifest["violations"] == 0
        assert manifest["bins"] == 25
        assert len(out.read_text().splitlines()) == 26

    def test_seed_determinism_across_runs(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["hist", "--preset", "fig5", "--count", "20000", "--seed", "7"]
        assert main(argv + ["--output", str(a)]) == 0
        assert main(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_round_trip_byte_identical(self, tmp_path, capsys):
        out = tmp_path / "sc.csv"
        argv = ["scatter", "--preset", "fig3", "--count", "10000",
                "--output", str(out)]
        assert main(argv) == 0
        manifest_path = tmp_path / "sc.manifest.json"
        saved_manifest = manifest_path.read_bytes()
        saved_csv = out.read_bytes()
        # feed the manifest back as the config; same outputs, same bytes
        assert main(["scatter", "--config", str(manifest_path),
                     "--output", str(out)]) == 0
        assert out.read_bytes() == saved_csv
        assert manifest_path.read_bytes() == saved_manifest


class TestOptimizeCommand:
    def test_sudden_optimum(self, tmp_path, capsys):
        out = tmp_path / "opt.csv"
        code = main(["optimize", "--regime", "sudden", "--tau", "0.25",
                     "--v", "0.9", "--output", str(out)])
        assert code == 0
        row = next(csv.DictReader(out.open()))
        assert float(row["z_opt_numeric"]) == pytest.approx(0.649773, abs=1e-5)
        assert float(row["abs_diff"]) < 1e-6
        assert float(row["eta_at_opt"]) == pytest.approx(0.238541, abs=1e-5)

    def test_adiabatic_optimum(self, tmp_path, capsys):
        out = tmp_path / "opt.csv"
        assert main(["optimize", "--regime", "adiabatic", "--tau", "0.25",
                     "--v", "0", "--output", str(out)]) == 0
        row = next(csv.DictReader(out.open()))
        assert float(row["z_opt_numeric"]) == pytest.approx(0.5, abs=1e-6)

    def test_unknown_regime(self, capsys):
        assert main(["optimize", "--regime", "warp", "--tau", "0.5",
                     "--v", "0"]) == 1


class TestVerifyCommand:
    def test_full_run_passes(self, capsys):
        code = main(["verify"])
        out = capsys.readouterr().out
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) >= 15
        assert all(l.startswith("PASS") for l in lines)
        assert "all" in out.splitlines()[-1]

    def test_failing_check_exits_3(self, capsys, monkeypatch):
        from relotto import verify as verify_mod

        def fake_checks():
            return [verify_mod.CheckResult("demo-good", True),
                    verify_mod.CheckResult("demo-bad", False, "broke")]

        monkeypatch.setattr(verify_mod, "run_all_checks", fake_checks)
        code = main(["verify"])
        out = capsys.readouterr().out
        assert code == 3
        assert "FAIL demo-bad" in out and "demo-bad" in out.splitlines()[-1]


class TestParser:
    def test_unknown_command(self, capsys):
        assert main(["transmogrify"]) == 1

    def test_unknown_flag(self, capsys):
        assert main(["bounds", "--tau", "0.5", "--v", "0.5", "--frob", "1"]) == 1
