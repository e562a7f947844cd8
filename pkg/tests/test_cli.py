import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

PKG_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def _run(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "comspect.cli", *args],
        capture_output=True,
        env=env,
        cwd=PKG_DIR,
    )


@pytest.fixture()
def diag_matrix(tmp_path):
    path = tmp_path / "diag3.json"
    doc = {
        "n": 3,
        "entries": [
            [1, 0], [0, 0], [0, 0],
            [0, 0], [3, 0], [0, 0],
            [0, 0], [0, 0], [0, -2],
        ],
    }
    path.write_text(json.dumps(doc))
    return str(path)


class TestSpectrum:
    def test_diagonal_example(self, diag_matrix):
        r = _run(["spectrum", "-i", diag_matrix])
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["eigenvalues"] == [[3, 0], [0, -2], [1, 0]]
        assert doc["singularValues"] == [3, 2, 1]
        assert doc["schemaVersion"] == "1"

    def test_output_reparses(self, diag_matrix, tmp_path):
        out = tmp_path / "out.json"
        r = _run(["spectrum", "-i", diag_matrix, "-o", str(out)])
        assert r.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["n"] == 3


class TestFunctional:
    def test_report_fields(self, diag_matrix):
        r = _run(["functional", "-i", diag_matrix])
        doc = json.loads(r.stdout)
        assert doc["nu"] == 3
        assert doc["chi"] == [4, -2]
        assert doc["mu"] == pytest.approx(math.log(3) + math.log(2))
        # chiPhi within e*nu of chi
        dev = math.hypot(doc["chi"][0] - doc["chiPhi"][0], doc["chi"][1] - doc["chiPhi"][1])
        assert dev <= math.e * doc["nu"]


class TestCutoffReport:
    def test_constants(self):
        r = _run(["cutoff-report", "--grid-size", "64"])
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["c1"] >= doc["psi1"] > 0
        assert doc["psiSlope"] == pytest.approx(doc["c1"])
        assert doc["minLaplacian"] >= -1e-5


class TestCriterion:
    def test_alternating_harmonic_out(self, tmp_path):
        path = tmp_path / "alt.json"
        path.write_text(json.dumps({"kind": "power", "c": 1.0, "a": 1.0, "alternating": True}))
        r = _run(["criterion", "-i", str(path), "--ideal", "schatten:p=1", "--prefix-length", "100000"])
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["verdict"] == "NotInComJ"
        assert doc["condition2"]["status"] == "Out"
        assert doc["hermitianSplit"] is None

    def test_matrix_input_and_table(self, diag_matrix, tmp_path):
        table = tmp_path / "table.csv"
        r = _run([
            "criterion", "-i", diag_matrix, "--ideal", "schatten:p=2",
            "--emit-table", str(table), "--table-rows", "10",
        ])
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["verdict"] == "InComJ"
        rows = table.read_text().strip().splitlines()
        assert rows[0] == "n,c_n,u_n"
        assert len(rows) == 11
        n1 = rows[1].split(",")
        assert float(n1[1]) <= float(n1[2]) + 1e-12

    def test_bad_ideal_string(self, diag_matrix):
        r = _run(["criterion", "-i", diag_matrix, "--ideal", "nuclear:p=1"])
        assert r.returncode == 2


class TestStability:
    def test_power_law_report(self, tmp_path):
        path = tmp_path / "seq.json"
        path.write_text(json.dumps({"kind": "power", "c": 1.0, "a": 2.0}))
        r = _run(["stability", "-i", str(path), "--ideal", "schatten:p=1", "--n-max", "2000"])
        assert r.returncode == 0
        doc = json.loads(r.stdout)
        assert doc["inputVerdict"]["status"] == "In"
        assert doc["meanVerdict"]["status"] == "In"
        assert doc["chainHolds"] is True
        assert doc["empiricalConstant"] <= doc["proofConstant"]

    def test_table(self, tmp_path):
        path = tmp_path / "seq.json"
        path.write_text(json.dumps({"kind": "geometric", "c": 1.0, "q": 0.5}))
        table = tmp_path / "stab.csv"
        r = _run([
            "stability", "-i", str(path), "--ideal", "schatten:p=1",
            "--n-max", "500", "--emit-table", str(table), "--table-rows", "8",
        ])
        assert r.returncode == 0
        rows = table.read_text().strip().splitlines()
        assert rows[0] == "n,s_n,t_n,u_n"
        assert len(rows) == 9


class TestExitCodes:
    def test_malformed_json_is_two(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{ nope")
        r = _run(["spectrum", "-i", str(path)])
        assert r.returncode == 2
        assert b"line 1" in r.stderr

    def test_schema_violation_is_two(self, tmp_path):
        path = tmp_path / "short.json"
        path.write_text(json.dumps({"n": 2, "entries": [[1, 0]]}))
        r = _run(["spectrum", "-i", str(path)])
        assert r.returncode == 2
        assert b"entries" in r.stderr

    def test_verify_violations_exit_one(self):
        r = _run(["verify", "--suite", "lemma2_2_control", "--trials", "50", "--seed", "1"])
        assert r.returncode == 1
        doc = json.loads(r.stdout)
        assert doc["passed"] is False

    def test_verify_pass_exit_zero(self):
        r = _run(["verify", "--suite", "lemma2_2", "--trials", "50", "--seed", "1"])
        assert r.returncode == 0


class TestDeterminism:
    def test_verify_bytes_stable(self):
        args = ["verify", "--suite", "lemma2_3", "--trials", "80", "--seed", "7"]
        a, b = _run(args), _run(args)
        assert a.stdout == b.stdout and a.stdout

    def test_stable_across_thread_settings(self, diag_matrix):
        args = ["verify", "--suite", "thm2_7", "--trials", "60", "--seed", "3"]
        one = _run(args, {"COMSPECT_THREADS": "1"})
        four = _run(args, {"COMSPECT_THREADS": "4", "OPENBLAS_NUM_THREADS": "4"})
        assert one.stdout == four.stdout
        s_one = _run(["spectrum", "-i", diag_matrix], {"COMSPECT_THREADS": "1"})
        s_four = _run(["spectrum", "-i", diag_matrix], {"COMSPECT_THREADS": "4"})
        assert s_one.stdout == s_four.stdout

    def test_seventeen_digit_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        doc = {"n": 4, "entries": [[z.real, z.imag] for z in m.ravel()]}
        path = tmp_path / "m.json"
        path.write_text(json.dumps(doc))
        r = _run(["spectrum", "-i", str(path)])
        out = json.loads(r.stdout)
        eig = np.array([complex(a, b) for a, b in out["eigenvalues"]])
        direct = np.linalg.eigvals(m)
        assert np.allclose(np.sort_complex(eig), np.sort_complex(direct), atol=1e-12)
