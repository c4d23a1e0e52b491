import json

import numpy as np
import pytest

from mnsurv import QuadratureSpec, build_instance, compare_routes
from mnsurv.cli import emit_report, report_to_dict, run


def run_to_file(tmp_path, args, name="out.bin"):
    path = tmp_path / name
    code = run(args + ["--out", str(path)])
    return code, path.read_bytes()


class TestEmit:
    def test_json_round_trip_is_bit_exact(self):
        inst = build_instance(10, [0.3, 0.3], [2, 3])
        report = compare_routes(
            inst,
            QuadratureSpec(nodes=32),
            mc_spec=QuadratureSpec(mode="monte-carlo", replications=5000, seed=3),
        )
        parsed = json.loads(emit_report(report, "json"))
        assert parsed["routes"]["exact"] == report.exact
        assert parsed["routes"]["dirichlet"] == report.dirichlet
        assert parsed["routes"]["gaussian"] == report.gaussian
        assert parsed["routes"]["mc"]["estimate"] == report.mc.estimate
        assert parsed["routes"]["mc"]["stderr"] == report.mc.stderr
        assert parsed["diagnostics"]["delta_n"] == report.delta_n
        assert parsed["diagnostics"]["gamma_tilde"] == report.gamma_tilde
        assert parsed["diagnostics"]["max_rel_diff"] == report.max_rel_diff
        assert parsed["instance"] == {"n": 10, "d": 2, "p": [0.3, 0.3], "k": [2, 3]}
        assert parsed["params"] == {"nodes": 32, "tolerance": 1e-8}

    def test_inapplicable_gaussian_marker(self):
        report = compare_routes(build_instance(10, [0.3, 0.3], [1, 3]))
        parsed = json.loads(emit_report(report, "json"))
        assert "inapplicable" in parsed["routes"]["gaussian"]

    def test_csv_columns(self):
        report = compare_routes(build_instance(10, [0.3, 0.3], [2, 3]))
        text = emit_report(report, "csv").decode()
        header, row = text.strip().splitlines()
        assert header == (
            "n,d,p_1,p_2,k_1,k_2,exact,dirichlet,gaussian,"
            "mc_est,mc_se,delta_n,gamma_tilde,max_rel_diff"
        )
        cells = row.split(",")
        assert cells[0] == "10" and cells[1] == "2"
        assert float(cells[6]) == report.exact
        assert cells[9] == "" and cells[10] == ""  # no MC requested

    def test_report_dict_none_routes(self):
        report = compare_routes(build_instance(10, [0.3], [3]), routes=["exact"])
        payload = report_to_dict(report)
        assert payload["routes"]["dirichlet"] is None
        assert payload["routes"]["mc"] is None


class TestExitCodes:
    def test_usage_error_on_unknown_flag(self, capsys):
        assert run(["eval", "--frobnicate"]) == 1

    def test_usage_error_on_missing_inputs(self, capsys):
        assert run(["eval", "--n", "10"]) == 1

    def test_usage_error_on_bad_route(self, capsys):
        assert run(["eval", "--n", "4", "--p", "0.5", "--k", "2", "--routes", "magic"]) == 1

    def test_usage_error_on_mc_without_seed(self, capsys):
        args = ["eval", "--n", "4", "--p", "0.5", "--k", "2",
                "--routes", "mc", "--mc-reps", "2000"]
        assert run(args) == 1

    def test_usage_error_on_bad_sweep_range(self, capsys):
        assert run(["sweep", "--n", "10:5:2", "--p", "0.3", "--k", "2"]) == 1

    def test_usage_error_on_nonpositive_tolerance(self, capsys):
        assert run(["eval", "--n", "4", "--p", "0.5", "--k", "2", "--tolerance", "0"]) == 1
        assert run(["check", "--tol", "-1"]) == 1

    def test_validation_error_on_bad_weights(self, capsys):
        assert run(["eval", "--n", "10", "--p", "0.7,0.7", "--k", "1,1"]) == 2

    def test_validation_error_on_length_mismatch(self, capsys):
        assert run(["eval", "--n", "10", "--p", "0.3,0.3", "--k", "1"]) == 2

    def test_success(self, tmp_path):
        code, _ = run_to_file(
            tmp_path, ["eval", "--n", "4", "--p", "0.5", "--k", "2"]
        )
        assert code == 0


class TestSubcommands:
    def test_eval_routes_filter(self, tmp_path):
        code, payload = run_to_file(
            tmp_path,
            ["eval", "--n", "10", "--p", "0.3,0.3", "--k", "2,3",
             "--routes", "exact,dirichlet", "--nodes", "48"],
        )
        assert code == 0
        parsed = json.loads(payload)
        assert parsed["routes"]["gaussian"] is None
        assert parsed["routes"]["exact"] is not None

    def test_compare_includes_everything(self, tmp_path):
        code, payload = run_to_file(
            tmp_path,
            ["compare", "--n", "10", "--p", "0.3,0.3", "--k", "2,3",
             "--mc-reps", "2000", "--seed", "5"],
        )
        assert code == 0
        parsed = json.loads(payload)
        assert parsed["routes"]["mc"]["seed"] == 5
        assert parsed["diagnostics"]["max_rel_diff"] is not None

    def test_byte_identical_reruns(self, tmp_path):
        args = ["compare", "--n", "10", "--p", "0.3,0.3", "--k", "2,3",
                "--mc-reps", "2000", "--seed", "5", "--format", "csv"]
        _, first = run_to_file(tmp_path, args, "a.csv")
        _, second = run_to_file(tmp_path, args, "b.csv")
        assert first == second

    def test_sweep_csv_grid(self, tmp_path):
        code, payload = run_to_file(
            tmp_path,
            ["sweep", "--n", "5:7:1", "--p", "0.3,0.3", "--k-all", "--format", "csv"],
        )
        assert code == 0
        lines = payload.decode().strip().splitlines()
        assert lines[0].startswith("n,d,p_1")
        assert sum(line.startswith("n,") for line in lines) == 1  # header once
        # grid size: all k with k_i >= 1, k_1 + k_2 <= n, for n in 5..7
        expected = sum((n - 1) * n // 2 for n in (5, 6, 7))
        assert len(lines) - 1 == expected

    def test_sweep_fixed_k_json(self, tmp_path):
        code, payload = run_to_file(
            tmp_path,
            ["sweep", "--n", "5:20:5", "--p", "0.3,0.3", "--k", "2,2"],
        )
        assert code == 0
        parsed = json.loads(payload)
        assert [rec["instance"]["n"] for rec in parsed] == [5, 10, 15, 20]

    def test_batch_input(self, tmp_path):
        batch = tmp_path / "batch.json"
        batch.write_text(json.dumps([
            {"n": 10, "p": [0.3], "k": [3]},
            {"n": 12, "p": [0.25], "k": [4]},
        ]))
        code, payload = run_to_file(tmp_path, ["eval", "--input", str(batch)])
        assert code == 0
        parsed = json.loads(payload)
        assert len(parsed) == 2
        assert parsed[1]["instance"]["n"] == 12

    def test_check_passes(self, capsys):
        assert run(["check", "--tol", "1e-8", "--seed", "42"]) == 0
        out = capsys.readouterr().out
        assert "route_agreement" in out
        assert "FAIL" not in out

    def test_check_fails_with_impossible_tolerance(self, capsys):
        assert run(["check", "--identity-tol", "1e-30", "--seed", "42"]) == 3
        assert "FAIL" in capsys.readouterr().out


class TestFloatFormatting:
    def test_seventeen_digits_round_trip(self):
        rng = np.random.default_rng(70)
        from mnsurv.cli import _fmt_float

        for _ in range(1000):
            x = float(rng.uniform(-1, 1)) * 10.0 ** int(rng.integers(-12, 12))
            assert float(_fmt_float(x)) == x
