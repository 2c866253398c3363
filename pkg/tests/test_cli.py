import csv
import hashlib
import json

import numpy as np
import pytest

from lstsim import cli
from lstsim.shadow_acquisition import read_ensemble


def run(*argv):
    return cli.main(list(argv))


class TestSample:
    def test_writes_deterministic_ensemble(self, tmp_path, capsys):
        out1 = tmp_path / "a.bin"
        out2 = tmp_path / "b.bin"
        for out in (out1, out2):
            assert run("sample", "--code", "nn5_513", "--p", "0.1", "--shots", "300",
                       "--seed", "7", "--out", str(out)) == 0
        assert hashlib.sha256(out1.read_bytes()).hexdigest() == hashlib.sha256(out2.read_bytes()).hexdigest()
        ens = read_ensemble(out1)
        assert ens.shots == 300 and ens.p == 0.1 and ens.master_seed == 7

    def test_zero_shots_is_usage_error(self, tmp_path):
        assert run("sample", "--code", "nn5_513", "--p", "0.1", "--shots", "0",
                   "--out", str(tmp_path / "x.bin")) == 1

    def test_missing_out_is_usage_error(self):
        assert run("sample", "--code", "nn5_513", "--p", "0.1", "--shots", "10") == 1

    def test_trivial_single_qubit_shadows(self, tmp_path):
        # a [[1,1]] code file: single-qubit shadows
        code_file = tmp_path / "triv.code"
        code_file.write_text("1 1\nX:\n+X\nZ:\n+Z\n")
        out = tmp_path / "t.bin"
        assert run("sample", "--code", str(code_file), "--p", "0.0", "--shots", "50",
                   "--out", str(out)) == 0
        ens = read_ensemble(out)
        assert ens.n_sector == 1 and ens.k == 1

    def test_jsonl_sidecar(self, tmp_path):
        out = tmp_path / "a.bin"
        assert run("sample", "--code", "nn5_513", "--p", "0.0", "--shots", "20",
                   "--seed", "1", "--out", str(out), "--jsonl") == 0
        assert (tmp_path / "a.bin.jsonl").exists()


class TestEstimate:
    @pytest.fixture
    def ensemble_file(self, tmp_path):
        out = tmp_path / "e.bin"
        assert run("sample", "--code", "nn5_513", "--p", "0.0", "--shots", "400",
                   "--seed", "3", "--out", str(out)) == 0
        return out

    def test_noiseless_fidelity_near_one(self, ensemble_file, tmp_path, capsys):
        report_file = tmp_path / "rep.json"
        assert run("estimate", "--ensemble", str(ensemble_file), "--code", "nn5_513",
                   "--fidelity", "--m", "1", "--out", str(report_file)) == 0
        report = json.loads(report_file.read_text())
        assert abs(report["ratio"] - 1.0) < 4 * max(report["bootstrap_std"], 1e-9)

    def test_code_mismatch_rejected(self, ensemble_file):
        assert run("estimate", "--ensemble", str(ensemble_file), "--code", "nn7_steane",
                   "--fidelity") == 1

    def test_m2_report_has_diagnostics(self, ensemble_file, capsys):
        assert run("estimate", "--ensemble", str(ensemble_file), "--code", "nn5_513",
                   "--observable", "Z", "--m", "2") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["m_max"] == 2
        assert report["moments"]["2"]["samples"] == 200

    def test_config_file_defaults(self, ensemble_file, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"code": "nn5_513", "observable": "Z", "m": 1}))
        assert run("--config", str(cfg), "estimate", "--ensemble", str(ensemble_file)) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["m_max"] == 1

    def test_samples_out_csv(self, ensemble_file, tmp_path):
        samples = tmp_path / "samples.csv"
        assert run("estimate", "--ensemble", str(ensemble_file), "--code", "nn5_513",
                   "--observable", "Z", "--m", "1", "--samples-out", str(samples)) == 0
        rows = list(csv.DictReader(samples.open()))
        assert len(rows) == 400
        assert set(rows[0]) == {"moment", "tuple_index", "numerator", "denominator"}
        num = np.mean([float(r["numerator"]) for r in rows])
        den = np.mean([float(r["denominator"]) for r in rows])
        assert abs(num / den - 1.0) < 0.2  # noiseless ensemble


class TestSweeps:
    def test_threshold_sweep_schema(self, tmp_path):
        out = tmp_path / "th.csv"
        assert run("threshold-sweep", "--code", "nn5_513", "--shots", "200",
                   "--p-grid", "0.05:0.5:2", "--seed", "1", "--out", str(out)) == 0
        rows = list(csv.DictReader(out.open()))
        assert [c for c in rows[0]] == [
            "p", "physical_infidelity", "dense_infid_m1", "dense_infid_m2",
            "lst_infid_m1", "lst_m1_std", "lst_infid_m2", "lst_m2_std",
        ]
        assert len(rows) == 2
        assert float(rows[0]["physical_infidelity"]) == pytest.approx(2 * 0.05 / 3)

    def test_code_size_sweep(self, tmp_path):
        out = tmp_path / "cs.csv"
        assert run("code-size-sweep", "--codes", "nn5_513,nn7_steane", "--p", "0.01",
                   "--shots", "300", "--budgets", "100,300", "--seed", "2",
                   "--out", str(out)) == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 4
        assert {r["code"] for r in rows} == {"nn5_513", "nn7_steane"}

    def test_budget_exceeding_shots_rejected(self, tmp_path):
        assert run("code-size-sweep", "--codes", "nn5_513", "--shots", "100",
                   "--budgets", "1000", "--out", str(tmp_path / "x.csv")) == 1

    def test_logical_scaling_sweep(self, tmp_path):
        out = tmp_path / "ls.csv"
        assert run("logical-scaling-sweep", "--k-values", "1,2", "--shots", "200",
                   "--p", "0.0", "--seed", "3", "--out", str(out)) == 0
        rows = list(csv.DictReader(out.open()))
        assert [r["k"] for r in rows] == ["1", "2"]

    def test_bad_grid_is_usage_error(self, tmp_path):
        assert run("threshold-sweep", "--p-grid", "oops", "--out", str(tmp_path / "x.csv")) == 1


class TestMakeCode:
    def test_generates_loadable_code(self, tmp_path):
        out = tmp_path / "c.code"
        assert run("make-code", "--n", "8", "--seed", "5", "--out", str(out)) == 0
        from lstsim.codes import load_code, verify_distance_at_least

        code = load_code(out)
        assert (code.n_physical, code.k_logical) == (8, 1)
        assert verify_distance_at_least(code, 3)


class TestOracleCheck:
    def test_default_seed_passes(self, capsys):
        assert run("oracle-check", "--seed", "1") == 0
        out = capsys.readouterr().out
        assert out.count("[PASS]") == len(cli.ORACLE_CHECKS)
        assert "[FAIL]" not in out

    def test_injected_sign_bug_fails_associativity(self, capsys, monkeypatch):
        import lstsim.gf2_pauli as gp

        true_multiply = gp.multiply

        def buggy_multiply(p, q):
            r = true_multiply(p, q)
            if r.weight >= 2 and r.phase_exp in (0, 2):
                return r.with_phase(r.phase_exp ^ 2)  # sign bug on wide products
            return r

        monkeypatch.setattr(cli, "ORACLE_CHECKS", cli.ORACLE_CHECKS[:2])
        monkeypatch.setattr(gp, "multiply", buggy_multiply)
        assert run("oracle-check", "--seed", "1") == 2
        out = capsys.readouterr().out
        assert "[FAIL]" in out
