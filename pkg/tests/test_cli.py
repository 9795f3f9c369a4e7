"""End-to-end CLI behavior: formats, determinism, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from treecut.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_segment_canonical_bytes(self, capsys):
        code, out, _ = run_cli(["gen", "--family", "segment", "--n", "3"], capsys)
        assert code == 0
        assert out == "4\n-1 0 1 2\n"

    def test_random_family_requires_seed(self, capsys):
        code, _, err = run_cli(["gen", "--family", "gw_size", "--n", "10",
                                "--offspring", "geom:0.5"], capsys)
        assert code == 2
        assert "seed" in err

    def test_gen_to_file_and_round_trip(self, tmp_path, capsys):
        path = tmp_path / "t.txt"
        code, _, _ = run_cli(["gen", "--family", "gw_size", "--n", "25",
                              "--offspring", "geom:0.5", "--seed", "4",
                              "--out", str(path)], capsys)
        assert code == 0
        code, out1, _ = run_cli(["metrics", str(path)], capsys)
        assert code == 0
        # identical metrics when the family is regenerated directly
        code, out2, _ = run_cli(["metrics", "--family", "gw_size", "--n", "25",
                                 "--offspring", "geom:0.5", "--seed", "4"], capsys)
        assert out1 == out2


class TestMix:
    def test_two_path_json(self, tmp_path, capsys):
        path = tmp_path / "p2.txt"
        path.write_text("2\n-1 0\n")
        code, out, _ = run_cli(["mix", str(path), "--eps", "0.25"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == "treecut/1"
        assert payload["t_mix"] == pytest.approx(np.log(2) / 2, rel=1e-6)

    def test_curve_csv(self, tmp_path, capsys):
        path = tmp_path / "p3.txt"
        path.write_text("3\n-1 0 1\n")
        code, out, _ = run_cli(["mix", str(path), "--curve", "5"], capsys)
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "t,tv"
        assert len(lines) == 6
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == pytest.approx(2 / 3, rel=1e-9)

    def test_both_sources_rejected(self, tmp_path, capsys):
        path = tmp_path / "p2.txt"
        path.write_text("2\n-1 0\n")
        code, _, err = run_cli(["mix", str(path), "--family", "segment",
                                "--n", "2"], capsys)
        assert code == 2


class TestSpectrumBounds:
    def test_spectrum_json(self, capsys):
        code, out, _ = run_cli(["spectrum", "--family", "segment", "--n", "2"],
                               capsys)
        payload = json.loads(out)
        assert payload["gap"] == pytest.approx(1.0, abs=1e-10)
        assert payload["method"] == "dense"

    def test_spectrum_iterative_above_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("TREECUT_MAX_VERTICES", "20")
        code, out, _ = run_cli(["spectrum", "--family", "segment", "--n", "40"],
                               capsys)
        payload = json.loads(out)
        assert payload["method"] == "iterative"
        expect = 4 * np.sin(np.pi / (2 * 41)) ** 2
        assert payload["gap"] == pytest.approx(expect, rel=1e-8)

    def test_bounds_schema(self, capsys):
        code, out, _ = run_cli(["bounds", "--family", "segment", "--n", "4"],
                               capsys)
        payload = json.loads(out)
        b = payload["bounds"]
        for key in ("hardy_lower", "cor24", "cor25", "cor26", "tail32",
                    "hardy_interval"):
            assert key in b
        assert b["hardy_lower"] <= payload["t_rel"] * (1 + 1e-9)
        assert payload["t_rel"] <= min(b["cor24"], b["cor25"], b["cor26"],
                                       b["tail32"]) * (1 + 1e-9)
        lo, hi = b["hardy_interval"]
        assert lo * (1 - 1e-9) <= payload["gap"] <= hi * (1 + 1e-9)


class TestBDChain:
    def test_json_fields(self, capsys):
        code, out, _ = run_cli(["bdchain", "--degrees", "2,3,3", "--n", "3"],
                               capsys)
        payload = json.loads(out)
        for key in ("rates", "stationary", "gap", "cs_bound", "lift_residual"):
            assert key in payload
        assert payload["lift_residual"] < 1e-8
        assert payload["cs_bound"] <= 1 / payload["gap"]

    def test_validation_exit_code(self, capsys):
        code, _, err = run_cli(["bdchain", "--degrees", "2,3", "--n", "9"],
                               capsys)
        assert code == 2


class TestSweep:
    def test_comb_two_rows_increasing_ratio(self, capsys):
        code, out, _ = run_cli(["sweep", "--family", "cor15",
                                "--sizes", "64,128"], capsys)
        payload = json.loads(out)
        rows = payload["rows"]
        assert len(rows) == 2
        assert rows[0]["ratio"] < rows[1]["ratio"]

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(["sweep", "--family", "segment",
                                "--sizes", "8,16", "--format", "csv"], capsys)
        lines = out.strip().split("\n")
        assert lines[0].startswith("n,sites,mode")
        assert len(lines) == 3

    def test_unknown_family_exit_code(self, capsys):
        code, _, err = run_cli(["sweep", "--family", "segment",
                                "--sizes", "0"], capsys)
        assert code == 2


class TestExitCodes:
    def test_malformed_tree_file(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("3\n-1 0\n")
        code, _, err = run_cli(["metrics", str(path)], capsys)
        assert code == 2

    def test_resource_cap_exit(self, capsys, monkeypatch):
        monkeypatch.setenv("TREECUT_MAX_VERTICES", "10")
        code, _, err = run_cli(["mix", "--family", "segment", "--n", "50",
                                "--eps", "0.25"], capsys)
        assert code == 3

    def test_missing_file(self, capsys):
        code, _, err = run_cli(["metrics", "/nonexistent/tree.txt"], capsys)
        assert code == 2


def test_byte_identical_runs():
    # determinism across processes, not just within one interpreter
    cmd = [sys.executable, "-m", "treecut", "sweep", "--family", "gw_size",
           "--sizes", "12,18", "--seed", "7", "--offspring", "geom:0.5"]
    a = subprocess.run(cmd, capture_output=True, cwd="/root/pkg").stdout
    b = subprocess.run(cmd, capture_output=True, cwd="/root/pkg").stdout
    assert a == b and len(a) > 0
