"""Command-line front end: exit codes, report payloads, CSV contract.

Commands run in-process through cli.main(argv) so exit codes and outputs
are captured exactly; one subprocess test covers the installed script.
"""

import csv
import json
import shutil
import subprocess

import numpy as np
import pytest

from priordp.cli import main

from conftest import CELLS_A, LEAK_A_WEAK

# n=3 instance whose exact weak-node leakage exceeds the chain value
# (output-space supremum at an interior kink; see the graph module notes)
GAP_DOMAINS = [
    [0.10349, 1.054202],
    [0.478443, 0.675144, 1.470922],
    [0.096648, 0.162482, 0.275522],
]
GAP_PROBS = [
    [[0.100398, 0.063861, 0.026383],
     [0.009052, 0.017902, 0.092856],
     [0.020024, 0.010434, 0.042519]],
    [[0.097272, 0.067118, 0.069631],
     [0.010166, 0.144402, 0.008741],
     [0.143384, 0.034375, 0.041481]],
]


@pytest.fixture
def table_a_file(tmp_path):
    path = tmp_path / "table_a.json"
    path.write_text(json.dumps({"domains": [[0, 1], [0, 1]], "probs": CELLS_A}))
    return str(path)


@pytest.fixture
def gauss_file(tmp_path):
    path = tmp_path / "gauss.json"
    model = {
        "mu": [0.0, 0.0],
        "sigma": [[1.0, 0.5], [0.5, 1.0]],
        "M": 1.0,
        "lambda": 1.0,
    }
    path.write_text(json.dumps(model))
    return str(path)


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


class TestAnalyzeDiscrete:
    def test_full_search_report(self, table_a_file, tmp_path, capsys):
        out = tmp_path / "rep.json"
        rc = main(["analyze-discrete", table_a_file, "--out", str(out)])
        assert rc == 0
        rep = read_json(out)
        assert rep["leakage"] == pytest.approx(LEAK_A_WEAK, abs=1e-9)
        assert rep["algorithm"] == "full"
        assert rep["invocation"].startswith("priordp analyze-discrete")
        assert capsys.readouterr().out == ""

    def test_fast_mode_stdout(self, table_a_file, capsys):
        rc = main(["analyze-discrete", table_a_file, "--mode", "fast"])
        assert rc == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["algorithm"] == "fast"
        assert rep["leakage"] == pytest.approx(LEAK_A_WEAK, abs=1e-9)

    def test_malformed_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["analyze-discrete", str(bad)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_query_length_mismatch(self, table_a_file, capsys):
        rc = main(["analyze-discrete", table_a_file, "--query", "1,2,3"])
        assert rc == 2
        assert "coefficients" in capsys.readouterr().err

    def test_size_cap(self, tmp_path, capsys):
        n = 16
        big = {
            "domains": [[0, 1]] * n,
            "probs": np.full((2,) * n, 2.0**-n).tolist(),
        }
        path = tmp_path / "big.json"
        path.write_text(json.dumps(big))
        assert main(["analyze-discrete", str(path)]) == 3
        assert "error:" in capsys.readouterr().err


class TestAnalyzeGaussian:
    def test_single_adversary(self, gauss_file, capsys):
        rc = main(["analyze-gaussian", gauss_file, "--adversary", "0"])
        assert rc == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["leakage"] == pytest.approx(1.5, abs=1e-12)
        assert rep["K"] == []

    def test_all_adversaries(self, tmp_path, capsys):
        model = {"mu": [0, 0, 0], "sigma": np.eye(3).tolist(), "M": 2, "lambda": 4}
        path = tmp_path / "id.json"
        path.write_text(json.dumps(model))
        rc = main(["analyze-gaussian", str(path), "--all"])
        assert rc == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["leakage"] == pytest.approx(0.5, abs=1e-12)
        assert rep["node_count"] == 12

    def test_flag_exclusivity(self, gauss_file, capsys):
        assert main(["analyze-gaussian", gauss_file]) == 2
        rc = main(
            ["analyze-gaussian", gauss_file, "--adversary", "0", "--all"]
        )
        assert rc == 2
        assert "exactly one" in capsys.readouterr().err

    def test_bad_adversary(self, gauss_file, capsys):
        assert main(["analyze-gaussian", gauss_file, "--adversary", "5"]) == 2
        assert main(["analyze-gaussian", gauss_file, "--adversary", "0,0"]) == 2


class TestOracleCheck:
    def test_discrete_pass(self, table_a_file, capsys):
        rc = main(["oracle-check", table_a_file])
        assert rc == 0
        out = capsys.readouterr().out
        assert "4/4 adversaries pass" in out

    def test_discrete_gap_detected(self, tmp_path, capsys):
        probs = np.asarray(GAP_PROBS)
        probs /= probs.sum()
        path = tmp_path / "gap.json"
        path.write_text(
            json.dumps({"domains": GAP_DOMAINS, "probs": probs.tolist()})
        )
        rc = main(["oracle-check", str(path)])
        assert rc == 4
        out = capsys.readouterr().out
        assert "FAIL" in out

    def test_gaussian_pass(self, gauss_file, tmp_path, capsys):
        out = tmp_path / "check.json"
        rc = main(["oracle-check", gauss_file, "--out", str(out)])
        assert rc == 0
        assert "4/4 adversaries pass" in capsys.readouterr().out
        rows = read_json(out)["rows"]
        assert len(rows) == 4 and all(r["pass"] for r in rows)

    def test_cap(self, tmp_path, capsys):
        model = {"mu": [0.0] * 9, "sigma": np.eye(9).tolist(), "M": 1, "lambda": 1}
        path = tmp_path / "wide.json"
        path.write_text(json.dumps(model))
        assert main(["oracle-check", str(path)]) == 3


class TestExperiment:
    HEADER = "averCorr,layer,mean_leakage,var_leakage,algorithm,seed_count"

    def run(self, tmp_path, name, args):
        out = tmp_path / name
        rc = main(args + ["--out", str(out)])
        return rc, out

    def test_discrete_sweep_csv(self, tmp_path):
        rc, out = self.run(
            tmp_path,
            "sweep.csv",
            [
                "experiment", "--kind", "discrete", "--n", "8",
                "--averCorr", "0.2,0.8", "--seeds", "3",
            ],
        )
        assert rc == 0
        text = out.read_text()
        assert text.splitlines()[0] == self.HEADER
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        # 2 sweep points x 2 algorithms x 8 layers
        assert len(rows) == 32
        assert {r["algorithm"] for r in rows} == {"full", "fast"}
        assert all(r["seed_count"] == "3" for r in rows)
        for r in rows:
            if r["layer"] == "1":
                # first layer is the fixed strongest-adversary scale
                assert float(r["mean_leakage"]) == pytest.approx(1.0)
                assert float(r["var_leakage"]) == pytest.approx(0.0)

    def test_deterministic_rerun_and_threads(self, tmp_path, monkeypatch):
        args = [
            "experiment", "--kind", "discrete", "--n", "6",
            "--averCorr", "0.5", "--seeds", "2",
        ]
        rc1, out1 = self.run(tmp_path, "a.csv", list(args))
        rc2, out2 = self.run(tmp_path, "b.csv", list(args))
        monkeypatch.setenv("PDP_THREADS", "2")
        rc3, out3 = self.run(tmp_path, "c.csv", list(args))
        assert rc1 == rc2 == rc3 == 0
        assert out1.read_bytes() == out2.read_bytes() == out3.read_bytes()

    def test_gaussian_sweep_values(self, tmp_path):
        rc, out = self.run(
            tmp_path,
            "gauss.csv",
            ["experiment", "--kind", "gaussian", "--n", "4", "--averCorr", "0.5"],
        )
        assert rc == 0
        with open(out, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        assert all(r["algorithm"] == "enumerate" for r in rows)
        weakest = [r for r in rows if r["layer"] == "4"][0]
        assert float(weakest["mean_leakage"]) == pytest.approx(2.5, abs=1e-12)

    def test_gaussian_infeasible_sweep(self, tmp_path, capsys):
        rc, _ = self.run(
            tmp_path,
            "bad.csv",
            ["experiment", "--kind", "gaussian", "--n", "4", "--averCorr", "-0.5"],
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_layer_filter(self, tmp_path):
        rc, out = self.run(
            tmp_path,
            "layers.csv",
            [
                "experiment", "--kind", "discrete", "--n", "6",
                "--averCorr", "0.5", "--seeds", "1", "--layers", "2,3",
            ],
        )
        assert rc == 0
        with open(out, newline="") as fh:
            layers = {r["layer"] for r in csv.DictReader(fh)}
        assert layers == {"2", "3"}

    def test_bad_arguments(self, tmp_path, capsys):
        rc, _ = self.run(
            tmp_path,
            "x.csv",
            ["experiment", "--kind", "discrete", "--n", "6", "--seeds", "0"],
        )
        assert rc == 2
        rc, _ = self.run(
            tmp_path,
            "y.csv",
            [
                "experiment", "--kind", "discrete", "--n", "6",
                "--layers", "9",
            ],
        )
        assert rc == 2
        capsys.readouterr()

    def test_bad_thread_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("PDP_THREADS", "0")
        rc, _ = self.run(
            tmp_path,
            "z.csv",
            ["experiment", "--kind", "discrete", "--n", "6", "--seeds", "1"],
        )
        assert rc == 2
        assert "PDP_THREADS" in capsys.readouterr().err


class TestCalibrate:
    def test_gaussian_closed_form(self, gauss_file, capsys):
        rc = main(["calibrate", gauss_file, "--epsilon", "1.0"])
        assert rc == 0
        rep = json.loads(capsys.readouterr().out)
        # max leakage 1.5/lambda, so epsilon 1 needs lambda 1.5
        assert rep["lambda"] == pytest.approx(1.5, abs=1e-3)
        assert rep["leakage_at_lambda"] <= 1.0 + 1e-12
        assert rep["method"] == "enumerate"

    def test_discrete_methods_agree(self, table_a_file, capsys):
        for method in ("full", "oracle"):
            rc = main(
                [
                    "calibrate", table_a_file,
                    "--epsilon", f"{LEAK_A_WEAK}",
                    "--method", method,
                ]
            )
            assert rc == 0
            rep = json.loads(capsys.readouterr().out)
            assert rep["lambda"] == pytest.approx(1.0, abs=1e-3)

    def test_bad_epsilon(self, table_a_file, capsys):
        assert main(["calibrate", table_a_file, "--epsilon", "-2"]) == 2
        capsys.readouterr()

    def test_zero_sensitivity(self, tmp_path, capsys):
        # the only weighted tuple has a single-point domain
        path = tmp_path / "flat.json"
        path.write_text(
            json.dumps({"domains": [[0, 1], [7]], "probs": [[0.5], [0.5]]})
        )
        rc = main(["calibrate", str(path), "--epsilon", "1", "--query", "0,1"])
        assert rc == 2
        assert "sensitivity" in capsys.readouterr().err


def test_installed_script(gauss_file):
    exe = shutil.which("priordp")
    assert exe, "console script not installed"
    proc = subprocess.run(
        [exe, "analyze-gaussian", gauss_file, "--adversary", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["leakage"] == pytest.approx(1.5)
