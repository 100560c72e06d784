"""Command-line interface tests: output fixtures, exit codes, atomic file
output, and worker-count invariance, all via in-process main() calls."""

import json
import math
import os

import pytest

from densediv.cli import main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


class TestEnumerate:
    def test_dense2_fixture(self, capsys):
        code, out, _ = run(capsys, ["enumerate", "--family", "dense", "--t", "2", "--x", "20"])
        assert code == 0
        assert out[0] == "n,omega,big_omega,tau,sigma"
        assert out[1] == "1,0,0,1,1"
        ns = [int(line.split(",")[0]) for line in out[1:]]
        assert ns == [1, 2, 4, 6, 8, 12, 16, 18, 20]
        assert out[6] == "12,2,3,6,28"

    def test_shifted2_keeps_three(self, capsys):
        code, out, _ = run(capsys, ["enumerate", "--family", "shifted2", "--x", "3"])
        assert code == 0
        assert [line.split(",")[0] for line in out[1:]] == ["1", "2", "3"]


class TestCount:
    def test_spot_values(self, capsys):
        code, out, _ = run(capsys, ["count", "--family", "dense", "--t", "2", "--x", "20"])
        assert (code, out) == (0, ["9"])
        code, out, _ = run(
            capsys, ["count", "--family", "dense", "--t", "2", "--x", "20", "--q", "2"]
        )
        assert (code, out) == (0, ["8"])
        code, out, _ = run(capsys, ["count", "--family", "practical", "--x", "20"])
        assert (code, out) == (0, ["9"])

    def test_engines_agree(self, capsys):
        base = ["count", "--family", "dense", "--t", "5/2", "--x", "150000"]
        _, out_py, _ = run(capsys, base + ["--engine", "python"])
        _, out_np, _ = run(capsys, base + ["--engine", "numpy"])
        assert out_py == out_np

    def test_scientific_integer_notation(self, capsys):
        _, out_sci, _ = run(capsys, ["count", "--family", "dense", "--t", "2", "--x", "1e3"])
        _, out_dec, _ = run(capsys, ["count", "--family", "dense", "--t", "2", "--x", "1000"])
        assert out_sci == out_dec

    def test_fractional_x_rejected(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["count", "--family", "dense", "--t", "2", "--x", "12.5"])
        assert info.value.code == 2
        capsys.readouterr()


class TestStats:
    def test_dense_row(self, capsys):
        code, out, _ = run(capsys, ["stats", "--family", "dense", "--t", "2", "--x", "1000"])
        assert code == 0
        assert out[0] == (
            "x,t,count,mean_omega,mean_big_omega,variance_omega,"
            "mean_tau,mean_log_tau,expected_omega,exceed_fraction"
        )
        fields = out[1].split(",")
        assert fields[0] == "1000" and fields[1] == "2"
        assert int(fields[2]) == 193
        assert float(fields[4]) >= float(fields[3])
        assert float(fields[8]) == pytest.approx(4.876236, abs=1e-5)

    def test_family_without_ratio_shows_zero_t(self, capsys):
        _, out, _ = run(capsys, ["stats", "--family", "practical", "--x", "100"])
        assert out[1].split(",")[1] == "0"


class TestTabulators:
    def test_wfun_grid(self, capsys):
        code, out, _ = run(capsys, ["wfun", "--umax", "4", "--step", "0.01"])
        assert code == 0
        assert out[0] == "abscissa,value"
        assert out[1] == "1,1"
        assert len(out) == 302  # header + 301 grid points
        u, value = out[101].split(",")
        assert float(u) == pytest.approx(2.0, abs=1e-9)
        assert float(value) == pytest.approx(0.5, abs=1e-9)

    def test_dfun_grid(self, capsys):
        code, out, _ = run(capsys, ["dfun", "--vmax", "4", "--step", "0.01"])
        assert code == 0
        assert out[1] == "0,1"
        assert len(out) == 402
        assert all(line.split(",")[1] == "1" for line in out[1:102])

    def test_bad_step_rejected(self, capsys):
        code, _, err = run(capsys, ["wfun", "--step", "0.5"])
        assert code == 2 and "error:" in err


class TestConstants:
    def test_text_layout(self, capsys):
        code, out, _ = run(capsys, ["constants"])
        assert code == 0
        assert len(out) == 8
        assert out[0].startswith("gamma") and out[0].endswith("0.577215664902")
        assert out[1].split()[-1] == "2.28029101651"

    def test_json_mode(self, capsys):
        code, out, _ = run(capsys, ["constants", "--json"])
        assert code == 0
        data = json.loads("\n".join(out))
        assert data["C"] == pytest.approx(2.28029101651436, rel=1e-11)
        assert set(data) == {
            "gamma", "C", "C_log2", "exp_shifted_prime", "exp_twin",
            "exp_shifted_prime_e", "exp_twin_e", "e_log2",
        }


class TestIdentity:
    def test_partition_exact(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "phi0", "--family", "dense", "--t", "2", "--x", "100"],
        )
        assert code == 0
        assert out == ["lhs,rhs,gap,pass", "100,100,0,true"]

    def test_shifted_partition_hand_value(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "phik", "--family", "dense", "--t", "2",
             "--x", "10", "--qs", "2"],
        )
        assert code == 0
        assert out[1] == "5,5,0,true"

    def test_weight_series(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "lambda0", "--family", "dense", "--t", "2",
             "--N", "1000"],
        )
        assert code == 0
        lhs, rhs, gap, passed = out[1].split(",")
        assert float(lhs) == pytest.approx(0.909572, abs=1e-6)
        assert rhs == "1" and passed == "true"

    def test_weight_shift(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "lambdak", "--family", "dense", "--t", "2",
             "--N", "1000", "--qs", "2,3"],
        )
        assert code == 0 and out[1].endswith("true")

    def test_log_moment_series(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "mu0", "--family", "dense", "--t", "2",
             "--N", "1000", "--s", "1.5"],
        )
        assert code == 0
        assert float(out[1].split(",")[0]) == pytest.approx(0.022671, abs=1e-6)

    def test_log_moment_limit(self, capsys):
        code, out, _ = run(
            capsys,
            ["identity", "--check", "muapprox", "--family", "dense", "--t", "2",
             "--x", "100"],
        )
        assert code == 0
        assert float(out[1].split(",")[0]) == pytest.approx(0.121665, abs=1e-6)

    def test_usage_errors(self, capsys):
        base = ["identity", "--family", "dense", "--t", "2"]
        assert run(capsys, base + ["--check", "phi0"])[0] == 2  # missing --x
        assert run(capsys, base + ["--check", "phik", "--x", "10"])[0] == 2
        assert run(capsys, base + ["--check", "phi0", "--x", "10", "--s", "0.5"])[0] == 2
        code, _, err = run(
            capsys,
            ["identity", "--check", "muapprox", "--family", "practical", "--x", "10"],
        )
        assert code == 2 and "dense" in err


class TestExperimentCommand:
    def test_count_ratio_pass(self, capsys):
        code, out, err = run(
            capsys, ["experiment", "count-ratio", "--t", "2", "--xs", "20,40"]
        )
        assert code == 0
        assert out[0] == "x,t,q,measured,predicted,rel_err,metric"
        assert len(out) == 3
        assert out[1].split(",")[-1] == "count_ratio"
        assert err.strip() == "experiment count-ratio: pass"

    def test_failing_experiment_exits_one(self, capsys):
        code, _, err = run(capsys, ["experiment", "margenstern", "--xs", "20,100"])
        assert code == 1
        assert "experiment margenstern: fail" in err

    def test_report_only_exits_zero(self, capsys):
        code, _, err = run(capsys, ["experiment", "tau-order", "--x", "10000"])
        assert code == 0
        assert "report-only" in err

    def test_json_report(self, capsys):
        code, out, _ = run(
            capsys,
            ["experiment", "count-ratio", "--t", "2", "--xs", "20,40", "--json"],
        )
        assert code == 0
        data = json.loads("\n".join(out))
        assert data["name"] == "count-ratio" and data["verdict"] == "pass"
        assert len(data["rows"]) == 2
        assert data["rows"][0]["measured"] == pytest.approx(2.394868, abs=1e-5)

    def test_concentration_multi_x(self, capsys):
        code, out, _ = run(
            capsys,
            ["experiment", "concentration", "--t", "2", "--xs", "1000,10000",
             "--xi", "50"],
        )
        assert code == 0
        assert len(out) == 7  # header + 3 rows per grid point

    def test_phi_scan_y_in_t_column(self, capsys):
        code, out, _ = run(
            capsys, ["experiment", "phi-scan", "--xs", "1000", "--ys", "10"]
        )
        assert code == 0
        assert out[1].split(",")[1] == "10"

    def test_missing_argument(self, capsys):
        code, _, err = run(capsys, ["experiment", "mean-omega", "--xs", "100,200"])
        assert code == 2 and "--t is required" in err


class TestOutputFile:
    def test_atomic_write(self, capsys, tmp_path):
        target = tmp_path / "count.txt"
        code, out, _ = run(
            capsys,
            ["count", "--family", "dense", "--t", "2", "--x", "20",
             "--out", str(target)],
        )
        assert code == 0
        assert out == []  # nothing on stdout when --out is given
        assert target.read_text() == "9\n"
        assert os.listdir(tmp_path) == ["count.txt"]  # no temp litter


class TestExitCodes:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["frobnicate"])
        assert info.value.code == 2
        capsys.readouterr()

    def test_usage_level_errors(self, capsys):
        assert run(capsys, ["count", "--family", "dense", "--x", "10"])[0] == 2
        assert run(capsys, ["count", "--family", "dense", "--t", "1", "--x", "10"])[0] == 2
        assert run(capsys, ["count", "--family", "practical", "--t", "2", "--x", "10"])[0] == 2

    def test_domain_errors_exit_one(self, capsys):
        code, _, err = run(capsys, ["enumerate", "--family", "dense", "--t", "2", "--x", "0"])
        assert code == 1 and "error:" in err

    def test_verbose_banner(self, capsys):
        code, _, err = run(
            capsys,
            ["--verbose", "count", "--family", "dense", "--t", "2", "--x", "20"],
        )
        assert code == 0 and err.startswith("densediv ")


class TestThreadInvariance:
    def test_count_and_stats(self, capsys):
        base = ["count", "--family", "practical", "--x", "50000"]
        _, one, _ = run(capsys, base + ["--threads", "1"])
        _, four, _ = run(capsys, base + ["--threads", "4"])
        assert one == four
        base = ["stats", "--family", "dense", "--t", "2", "--x", "50000",
                "--engine", "python"]
        _, one, _ = run(capsys, base + ["--threads", "1"])
        _, four, _ = run(capsys, base + ["--threads", "4"])
        assert one == four
