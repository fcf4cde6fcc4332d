import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from hhlflow.circuit import Circuit
from hhlflow.circuit.textio import dump
from hhlflow.circuit import gates as G
from hhlflow.cli import main
from hhlflow.mmio import read_matrix, read_vector, write_matrix, write_vector
from hhlflow.report import SCHEMAS

from conftest import random_unitary


def run_json(capsys, argv):
    code = main(argv + ["--json"])
    out = capsys.readouterr().out
    assert code == 0, out
    rec = json.loads(out)
    jsonschema.validate(rec, SCHEMAS[rec["command"]])
    return rec


def _strip_times(obj):
    if isinstance(obj, dict):
        return {k: _strip_times(v) for k, v in obj.items()
                if k not in ("circuit_generation_seconds", "simulation_seconds", "timings")}
    if isinstance(obj, list):
        return [_strip_times(v) for v in obj]
    return obj


@pytest.fixture
def identity_files(tmp_path):
    m, r = tmp_path / "a.mtx", tmp_path / "b.mtx"
    write_matrix(m, np.eye(2))
    write_vector(r, np.array([3.0, 4.0]))
    return str(m), str(r)


def test_solve_linear_identity(capsys, identity_files):
    rec = run_json(capsys, ["solve-linear", *identity_files])
    rep = rec["report"]
    assert rep["l2_error"] < 1e-8
    assert rep["n_data"] == 1 and rep["n_total"] == 3 and rep["n_qubits"] == 4
    assert np.allclose(rec["x"], [3.0, 4.0])


def test_solve_linear_text(capsys, identity_files):
    assert main(["solve-linear", *identity_files]) == 0
    out = capsys.readouterr().out
    assert "success probability" in out


def test_solve_linear_deterministic(capsys, tmp_path):
    r = np.random.default_rng(4)
    a = r.normal(size=(3, 3)) + 4 * np.eye(3)
    write_matrix(tmp_path / "a.mtx", a + a.T)
    write_vector(tmp_path / "b.mtx", r.normal(size=3))
    argv = ["solve-linear", str(tmp_path / "a.mtx"), str(tmp_path / "b.mtx"), "--n-qpe", "6",
            "--shots", "1000", "--seed", "9", "--fuse"]
    first = _strip_times(run_json(capsys, argv))
    second = _strip_times(run_json(capsys, argv))
    assert first == second
    assert first["report"]["fusion"]["gates_after"] <= first["report"]["fusion"]["gates_before"]


def test_solve_linear_missing_rhs(capsys, identity_files, tmp_path):
    missing = str(tmp_path / "nothere.mtx")
    assert main(["solve-linear", identity_files[0], missing]) == 1
    assert missing in capsys.readouterr().err


def test_solve_linear_dimension_mismatch(capsys, tmp_path, identity_files):
    write_vector(tmp_path / "c.mtx", np.ones(3))
    assert main(["solve-linear", identity_files[0], str(tmp_path / "c.mtx")]) == 1
    assert "rhs" in capsys.readouterr().err


def test_solve_linear_singular(capsys, tmp_path):
    write_matrix(tmp_path / "s.mtx", np.array([[1.0, 2.0], [2.0, 4.0]]))
    write_vector(tmp_path / "b.mtx", np.ones(2))
    assert main(["solve-linear", str(tmp_path / "s.mtx"), str(tmp_path / "b.mtx")]) == 1
    assert "singular" in capsys.readouterr().err


def test_estimate_identity(capsys, tmp_path):
    write_matrix(tmp_path / "i.mtx", np.eye(4))
    rec = run_json(capsys, ["estimate", str(tmp_path / "i.mtx")])
    plan = rec["plan"]
    assert (plan["n_data"], plan["n_qpe"], plan["n_total"]) == (2, 3, 5)
    assert rec["table1"] is None


def test_estimate_table1_convention(capsys, tmp_path):
    r = np.random.default_rng(0)
    q, _ = np.linalg.qr(r.normal(size=(32, 32)))
    w = np.linspace(1.0, 492.5, 32)
    w[::2] *= -1
    write_matrix(tmp_path / "k.mtx", (q * w) @ q.T)
    rec = run_json(capsys, ["estimate", str(tmp_path / "k.mtx"), "--table1-convention"])
    assert rec["plan"]["n_qpe"] == 9
    assert rec["table1"] == {"n_data": 5, "n_qpe": 10, "n_total": 16}
    main(["estimate", str(tmp_path / "k.mtx"), "--table1-convention"])
    assert "table convention" in capsys.readouterr().out


def test_estimate_non_square(capsys, tmp_path):
    write_matrix(tmp_path / "r.mtx", np.ones((2, 3)))
    assert main(["estimate", str(tmp_path / "r.mtx")]) == 1


def test_fuse_stats_hh(capsys, tmp_path):
    path = tmp_path / "hh.txt"
    dump(Circuit(1).extend([G.h(0), G.h(0)]), path)
    rec = run_json(capsys, ["fuse-stats", str(path)])
    assert (rec["fusion"]["gates_before"], rec["fusion"]["gates_after"]) == (2, 1)
    assert rec["equivalent"] is True


def test_fuse_stats_barrier(capsys, tmp_path, rng):
    path = tmp_path / "b.txt"
    dump(Circuit(3).extend([G.h(0), G.unitary(random_unitary(8, rng), (0, 1, 2)), G.x(1)]), path)
    rec = run_json(capsys, ["fuse-stats", str(path)])
    assert rec["fusion"]["barriers"] == 1 and rec["fusion"]["gates_after"] == 3
    main(["fuse-stats", str(path)])
    assert "barriers" in capsys.readouterr().out


def test_fuse_stats_generated(capsys):
    rec = run_json(capsys, ["fuse-stats", "--dim", "2", "--seed", "1", "--transpile"])
    assert rec["fusion"]["reduction"] >= 0.6 and rec["equivalent"] is True


def test_fuse_stats_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("width 1\nBOGUS 0\n")
    assert main(["fuse-stats", str(path)]) == 1


def test_powerflow_classical(capsys):
    rec = run_json(capsys, ["powerflow", "case14"])
    assert rec["converged"] and rec["iterations"] <= 10
    assert rec["vm"][13] == pytest.approx(1.036, abs=6e-4)
    assert main(["powerflow", "case14"]) == 0
    assert "converged" in capsys.readouterr().out


def test_powerflow_hhl_reports(capsys):
    rec = run_json(capsys, ["powerflow", "case14", "--solver", "hhl", "--variant",
                            "fast_decoupled", "--n-qpe", "8", "--tol", "1e-5"])
    first = rec["steps"][0]
    assert first["matrix_size"] == 13 and first["step_kind"] == "bprime"
    assert first["l2_error"] < 5e-3


def test_powerflow_nonconvergence(capsys):
    assert main(["powerflow", "case14", "--max-iter", "1"]) == 1
    assert "no convergence" in capsys.readouterr().err


@pytest.mark.parametrize("tol", ["0", "-1e-3"])
def test_powerflow_bad_tol(tol, capsys):
    with pytest.raises(SystemExit) as info:
        main(["powerflow", "case14", "--tol", tol])
    assert info.value.code == 2


def test_powerflow_missing_case(capsys):
    assert main(["powerflow", "/no/such/case.m"]) == 1
    assert "/no/such/case.m" in capsys.readouterr().err


def test_export_step(capsys, tmp_path):
    m, r = str(tmp_path / "bp.mtx"), str(tmp_path / "bp_rhs.mtx")
    rec = run_json(capsys, ["export-step", "case30", "--matrix-out", m, "--rhs-out", r])
    assert rec["size"] == 29
    assert read_matrix(m).shape == (29, 29) and read_vector(r).shape == (29,)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hhlflow", "--version"], capture_output=True,
                         text=True)
    assert out.returncode == 0 and "hhlflow" in out.stdout
