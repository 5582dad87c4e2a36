"""Command-line interface: argument handling, exit codes, and output formats."""

import csv
import json
import math

import pytest

from bellsim.cli import main, parse_angle


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseAngle:
    def test_bare_number_is_radians(self):
        assert parse_angle("0.5") == 0.5
        assert parse_angle(1.25) == 1.25

    def test_degree_suffix(self):
        assert parse_angle("30deg") == pytest.approx(math.pi / 6, abs=1e-15)
        assert parse_angle("90deg") == pytest.approx(math.pi / 2, abs=1e-15)

    def test_radian_suffix(self):
        assert parse_angle("1.5rad") == 1.5

    def test_rejections(self):
        from bellsim.cli import _ConfigError

        with pytest.raises(_ConfigError):
            parse_angle("fast")
        with pytest.raises(_ConfigError):
            parse_angle("inf")


class TestAnalytic:
    def test_csv_structure(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "analytic", "--grid", "log", "--start", "0.1", "--stop", "10",
            "--points", "5", "--out", str(out),
        ])
        assert code == 0
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0] == ["k", "mode", "p_s", "p_c", "ch"]
        body = [r for r in rows[1:] if not r[1].endswith("zero-crossing")]
        footers = [r for r in rows[1:] if r[1].endswith("zero-crossing")]
        # 5 k-points x 3 default modes.
        assert len(body) == 15
        # Crossings exist for both split-window laws, not the standard one.
        assert {r[1] for r in footers} == {
            "multiwindow-exact:zero-crossing",
            "multiwindow-paper:zero-crossing",
        }
        exact_root = float(
            next(r for r in footers if r[1].startswith("multiwindow-exact"))[0]
        )
        assert exact_root == pytest.approx(1.0359500170058693, abs=1e-9)

    def test_byte_identical_runs(self, tmp_path):
        args = ["analytic", "--grid", "log", "--start", "0.05", "--stop", "50",
                "--points", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_mode_filter(self, capsys):
        code, out, _ = run(capsys, "analytic", "--start", "1", "--stop", "2",
                           "--points", "2", "--modes", "standard")
        assert code == 0
        data_rows = [r for r in csv.reader(out.splitlines())][1:]
        assert all(r[1] == "standard" for r in data_rows)

    def test_empty_modes_warns_but_succeeds(self, capsys):
        code, out, err = run(capsys, "analytic", "--start", "1", "--stop", "2",
                             "--points", "2", "--modes", "")
        assert code == 0
        assert "empty mode" in err.lower()
        assert out.splitlines() == ["k,mode,p_s,p_c,ch"]

    def test_spec_file(self, capsys, tmp_path):
        spec = tmp_path / "sweep.json"
        spec.write_text(json.dumps({
            "k_grid": {"kind": "linear", "start": 1.0, "stop": 2.0, "points": 3},
            "modes": ["standard"],
        }))
        code, out, _ = run(capsys, "analytic", "--spec", str(spec))
        assert code == 0
        ks = [float(r[0]) for r in list(csv.reader(out.splitlines()))[1:]]
        assert ks == [1.0, 1.5, 2.0]

    def test_spec_flag_override(self, capsys, tmp_path):
        spec = tmp_path / "sweep.json"
        spec.write_text(json.dumps({
            "k_grid": {"kind": "linear", "start": 1.0, "stop": 2.0, "points": 3},
            "modes": ["standard"],
        }))
        code, out, _ = run(capsys, "analytic", "--spec", str(spec), "--points", "4")
        assert code == 0
        assert len(out.splitlines()) == 1 + 4

    def test_malformed_spec_reports_location(self, capsys, tmp_path):
        spec = tmp_path / "bad.json"
        spec.write_text('{"k_grid": {"kind": "linear",\n  "start": oops}}')
        code, _, err = run(capsys, "analytic", "--spec", str(spec))
        assert code == 1
        assert "line 2" in err

    def test_bad_grid_rejected(self, capsys):
        code, _, err = run(capsys, "analytic", "--start", "5", "--stop", "1",
                           "--points", "4")
        assert code == 1
        assert "error" in err.lower()

    def test_custom_angles(self, capsys):
        code, out, _ = run(
            capsys, "analytic", "--start", "1", "--stop", "2", "--points", "2",
            "--modes", "standard",
            "--angle-a", "30deg", "--angle-b", "60deg",
            "--angle-a-prime", "0deg", "--angle-b-prime", "90deg",
        )
        assert code == 0
        # Same angles as the defaults, so the values match the default run.
        default_code, default_out, _ = run(
            capsys, "analytic", "--start", "1", "--stop", "2", "--points", "2",
            "--modes", "standard",
        )
        assert out == default_out


class TestSimulate:
    def test_passing_run(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        code = main(["simulate", "--k", "1.0", "--trials", "20000", "--seed", "7",
                     "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert payload["passed"] is True
        assert payload["config"]["scheme"] == "single"
        assert len(payload["rows"]) == 8
        assert payload["max_abs_z"] <= 5.0
        assert "ch" in payload and "std_error" in payload["ch"]

    def test_halves_run_has_union_rows(self, capsys):
        code, out, _ = run(capsys, "simulate", "--k", "4.0", "--scheme", "halves",
                           "--trials", "20000", "--seed", "42")
        assert code == 0
        payload = json.loads(out)
        names = {row["name"] for row in payload["rows"]}
        assert {"union_ab", "union_ab_prime", "union_a_prime_b",
                "union_a_prime_b_prime"} <= names
        assert payload["monotonicity_violations"]

    def test_negative_control_exits_2(self, capsys):
        code, out, _ = run(capsys, "simulate", "--k", "4.0", "--analytic-k", "2.0",
                           "--trials", "20000", "--seed", "1")
        assert code == 2
        assert json.loads(out)["passed"] is False

    def test_bad_k_exits_1(self, capsys):
        code, _, err = run(capsys, "simulate", "--k", "0.0")
        assert code == 1
        assert "error" in err.lower()

    def test_bad_trials_exits_1(self, capsys):
        code, _, err = run(capsys, "simulate", "--k", "1.0", "--trials", "0")
        assert code == 1


class TestWaveform:
    def test_stats_csv(self, capsys):
        code, out, _ = run(capsys, "waveform", "stats")
        assert code == 0
        rows = dict(
            (r[0], r[1]) for r in csv.reader(out.splitlines()) if len(r) == 2
        )
        assert float(rows["mean"]) == pytest.approx(3.0, rel=1e-9)
        assert float(rows["maximum"]) == pytest.approx(16.0, rel=1e-9)
        assert float(rows["peak_to_mean"]) == pytest.approx(16.0 / 3.0, rel=1e-6)

    def test_stats_custom_wave(self, capsys):
        code, out, _ = run(capsys, "waveform", "stats", "--wave", "1",
                           "--omega", "2.0", "--amplitude", "3.0")
        assert code == 0
        rows = dict(
            (r[0], r[1]) for r in csv.reader(out.splitlines()) if len(r) == 2
        )
        assert float(rows["mean"]) == pytest.approx(4.5, rel=1e-9)

    def test_delays_csv(self, capsys):
        code, out, _ = run(capsys, "waveform", "delays", "--span", "300",
                           "--rate", "5", "--seed", "3")
        assert code == 0
        rows = list(csv.reader(out.splitlines()))
        assert rows[0] == ["quantity", "case", "bin_left", "bin_right", "value"]
        cases = {r[1] for r in rows[1:]}
        assert {"shared", "independent"} <= cases
        ratio_rows = [r for r in rows[1:] if r[0] == "median_ratio"]
        assert len(ratio_rows) == 1

    def test_windows_csv(self, capsys):
        code, out, _ = run(capsys, "waveform", "windows", "--span", "200",
                           "--rate", "2", "--windows", "0.1,1.0", "--seed", "5")
        assert code == 0
        rows = list(csv.reader(out.splitlines()))
        assert rows[0] == ["window", "shared", "independent"]
        assert len(rows) == 3
        widths = [float(r[0]) for r in rows[1:]]
        assert widths == [0.1, 1.0]
        shared = [int(r[1]) for r in rows[1:]]
        assert shared == sorted(shared)

    def test_bad_wave_exits_1(self, capsys):
        code, _, err = run(capsys, "waveform", "stats", "--wave", "")
        assert code == 1

    def test_bad_span_exits_1(self, capsys):
        code, _, err = run(capsys, "waveform", "delays", "--span", "-5")
        assert code == 1


class TestLhvCheck:
    def test_pass_run(self, capsys):
        code, out, _ = run(capsys, "lhv-check", "--models", "50", "--seed", "0")
        assert code == 0
        assert "result=PASS" in out
        assert "all_nonnegative=True" in out

    def test_deterministic(self, capsys):
        _, out1, _ = run(capsys, "lhv-check", "--models", "30", "--seed", "9")
        _, out2, _ = run(capsys, "lhv-check", "--models", "30", "--seed", "9")
        assert out1 == out2

    def test_adversarial_exits_1(self, capsys):
        code, _, err = run(capsys, "lhv-check", "--adversarial")
        assert code == 1
        assert "error" in err.lower()

    def test_bad_models_exits_1(self, capsys):
        code, _, _ = run(capsys, "lhv-check", "--models", "0")
        assert code == 1


class TestTopLevel:
    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0

    def test_unknown_command_exits_1(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1

    def test_no_command_exits_1(self, capsys):
        code, _, err = run(capsys)
        assert code == 1
