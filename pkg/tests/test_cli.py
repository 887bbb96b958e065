import json

import pytest

from eulersim.cli import main


def run(args):
    return main(args)


@pytest.fixture
def dipolar_files(tmp_path):
    prefix = str(tmp_path / "dip")
    code = run([
        "synth", "--model", "heisenberg2", "--target", "dipolar",
        "--group", "g1", "--tsim", "0.0333", "--out", prefix,
    ])
    assert code == 0
    return prefix


class TestSynth:
    def test_writes_weights_and_schedule(self, dipolar_files, capsys):
        weights = json.loads(open(dipolar_files + ".weights.json").read())
        assert weights["W"] == pytest.approx(2.0, abs=1e-8)
        assert weights["weights"]["Z0"] == pytest.approx(1.5, abs=1e-8)
        assert weights["format_version"] == 1
        schedule = json.loads(open(dipolar_files + ".schedule.json").read())
        assert schedule["mode"] == "eulerian"
        assert len(schedule["segments"]) == 16

    def test_self_target_trivially_feasible(self, capsys):
        code = run(["synth", "--model", "heisenberg2", "--target",
                    "xyz:1,1,1", "--group", "g1"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["total_weight"] <= 1.0 + 1e-8

    def test_honeycomb_kitaev(self, capsys):
        code = run(["synth", "--model", "honeycomb", "--target", "kitaev",
                    "--group", "honeycomb", "--tsim", "0.01"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["total_weight"] == pytest.approx(3.0, abs=1e-7)
        assert report["segment_count"] == 144
        assert report["group_order"] == 48

    def test_infeasible_exits_2(self, tmp_path):
        target = tmp_path / "bad_target.json"
        target.write_text(json.dumps(
            {"n_qubits": 2, "terms": [{"coeff": 1.0, "word": {"0": "X"}}]}
        ))
        code = run(["synth", "--model", "heisenberg2", "--target",
                    str(target), "--group", "g1"])
        assert code == 2

    def test_bad_group_exits_3(self):
        assert run(["synth", "--group", "nope"]) == 3


class TestVerify:
    def test_good_schedule_passes(self, dipolar_files):
        assert run(["verify", dipolar_files + ".schedule.json"]) == 0

    def test_corrupted_coast_exits_1(self, dipolar_files, tmp_path):
        doc = json.loads(open(dipolar_files + ".schedule.json").read())
        shift = 0.3 * doc["sim_interval"]
        for seg in doc["segments"][6:]:
            seg["start"] += shift
        doc["cycle_time"] += shift
        bad = tmp_path / "bad.schedule.json"
        bad.write_text(json.dumps(doc))
        assert run(["verify", str(bad)]) == 1

    def test_missing_file_exits_3(self):
        assert run(["verify", "/nonexistent/schedule.json"]) == 3


class TestSimulate:
    def test_small_infidelity(self, dipolar_files, capsys):
        code = run(["simulate", dipolar_files + ".schedule.json",
                    "--cycles", "2"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["infidelity"] < 1e-5
        assert len(report["per_cycle_error"]) == 2


class TestSweep:
    def test_deterministic_csv(self, tmp_path):
        args = ["sweep", "--model", "heisenberg2", "--target", "dipolar",
                "--group", "g1", "--param", "cycle", "--min", "0.01",
                "--max", "0.1", "--points", "4"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        lines = a.read_text().strip().splitlines()
        assert lines[0] == "cycle,cycle_time,error"
        assert len(lines) == 6  # header + 4 points + fit line
        assert lines[-1].startswith("# slope=")

    def test_span_too_small_exits_3(self):
        code = run(["sweep", "--model", "heisenberg2", "--target", "dipolar",
                    "--group", "g1", "--param", "cycle", "--min", "0.01",
                    "--max", "0.02", "--points", "4"])
        assert code == 3


class TestModels:
    def test_lists_presets(self, capsys):
        assert run(["models"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert "honeycomb" in report["groups"]
        assert len(report["honeycomb_plaquette"]["edges"]) == 6

    def test_group_export(self, capsys):
        assert run(["models", "--group", "g_dephasing"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["order"] == 8
        assert len(report["euler_cycle"]) == 24


class TestTabulatedShape:
    def test_csv_shape_flows_through(self, tmp_path, capsys):
        csv = tmp_path / "shape.csv"
        csv.write_text("0.0,0.0\n0.25,1.0\n0.5,1.4\n0.75,1.0\n1.0,0.0\n")
        prefix = str(tmp_path / "tab")
        assert run([
            "synth", "--model", "heisenberg2", "--target", "dipolar",
            "--group", "g1", "--tsim", "0.0333", "--shape", str(csv),
            "--out", prefix,
        ]) == 0
        capsys.readouterr()
        assert run(["verify", prefix + ".schedule.json"]) == 0
