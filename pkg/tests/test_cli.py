"""End-to-end command-line behavior: outputs, files, and exit codes."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from clustersim import qis
from clustersim.cli import main
from clustersim.runtime import Transcript

SKEW = "0.7,0.5,0.3,0.41231056256176607"


def _kv(out: str) -> dict:
    return dict(line.split(": ", 1) for line in out.strip().splitlines())


def test_teleport_success_path(tmp_path, capsys):
    path = tmp_path / "run.transcript"
    rc = main([
        "teleport", "--input", "0.6,0.8", "--rho", "1.5",
        "--max-trials", "12", "--seed", "0", "--transcript", str(path),
    ])
    out = _kv(capsys.readouterr().out)
    assert rc == 0
    assert out["protocol"] == "teleport"
    assert out["success"] == "true"
    assert out["trials_used"] == "2"
    assert float(out["fidelity"]) >= 1.0 - 1e-9
    assert out["povm_outcomes"].count(",") == 1  # one outcome per trial
    parsed = Transcript.parse(path.read_text())
    assert parsed.protocol == "teleport"
    assert len(parsed.messages) == 2 * int(out["trials_used"])


def test_teleport_failure_exit_code(capsys):
    rc = main(["teleport", "--input", "0.6,0.8", "--rho", "6", "--seed", "0"])
    out = _kv(capsys.readouterr().out)
    assert rc == 1
    assert out["success"] == "false"
    assert float(out["fidelity"]) == 0.0


def test_teleport_renormalize_flag(capsys):
    rc = main(["teleport", "--input", "3,4", "--seed", "0", "--max-trials", "12"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "error:" in err and "--renormalize" in err
    rc = main([
        "teleport", "--input", "3,4", "--renormalize",
        "--seed", "0", "--max-trials", "12",
    ])
    out = _kv(capsys.readouterr().out)
    assert rc == 0
    echoed = [float(tok) for tok in out["input"].split(",")]
    amps = np.array(echoed[0::2]) + 1j * np.array(echoed[1::2])
    assert np.linalg.norm(amps) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport", "--input", "0.6,0.8,0.1"],          # wrong count
        ["teleport", "--input", "0,0"],                  # zero vector
        ["teleport", "--input", "0.6,0.8", "--rho", "0.2"],  # invalid POVM
        ["teleport", "--input", "0.6,0.8", "--cluster", "0.5,0.5"],
        ["teleport", "--input", "0.6,0.8", "--cluster", "1,1,1,1"],
        ["qis", "--input", "1,0,0"],
        ["sweep-fig1", "--beta", "0.9", "--gamma", "0.5"],
        ["sweep-fig1", "--beta", "0.1:0.3"],             # malformed range
        ["sweep-fig1", "--n", "1"],
        # sampling makes the POVM validity constraint bite at this rho
        ["sweep-fig1", "--beta", "0.2", "--rho", "1.5", "--mc-samples", "10"],
        ["eve", "--protocol", "teleport", "--substitution"],
        ["eve", "--protocol", "teleport", "--attach", "9"],
    ],
)
def test_config_errors_exit_2(argv, capsys):
    rc = main(argv)
    captured = capsys.readouterr()
    assert rc == 2
    assert captured.err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    assert main(["teleport"]) == 2  # missing required --input
    capsys.readouterr()
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
    assert main(["--help"]) == 0
    assert "sweep-fig1" in capsys.readouterr().out


def test_qis_table_run(tmp_path, capsys):
    path = tmp_path / "qis.transcript"
    rc = main([
        "qis", "--input", "0.5,0.5,0.5,0.5", "--seed", "4",
        "--transcript", str(path),
    ])
    out = _kv(capsys.readouterr().out)
    assert rc == 0
    assert out["protocol"] == "qis"
    assert out["recovered"] == "true"
    assert out["correction_source"] == "table"
    key = out["outcome_key"]
    row = next(r for r in qis.TABLE1 if r.key.display() == key)
    assert out["correction"] == row.word.label()
    parsed = Transcript.parse(path.read_text())
    assert parsed.protocol == "qis"
    assert len(parsed.messages) == 3


def test_qis_complex_input_and_synthesized_source(capsys):
    raw = np.array([0.46 + 0.13j, 0.27 - 0.21j, -0.35 + 0.11j, 0.22 - 0.56j])
    raw = raw / np.linalg.norm(raw)
    text = ",".join(f"{v:.17g}" for pair in zip(raw.real, raw.imag) for v in pair)
    rc = main(["qis", "--input", text, "--seed", "2", "--correction", "synthesized"])
    out = _kv(capsys.readouterr().out)
    assert rc == 0
    assert out["correction_source"] == "synthesized"
    assert out["recovered"] == "true"


def test_qis_skewed_channel_exits_1(capsys):
    rc = main(["qis", "--input", "0.5,0.5,0.5,0.5", "--seed", "0",
               "--cluster", SKEW])
    out = _kv(capsys.readouterr().out)
    assert rc == 1
    assert out["recovered"] == "false"


def test_sweep_stdout_and_grid(capsys):
    rc = main(["sweep-fig1", "--beta", "0.1:0.3:0.1", "--n", "2,5"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "beta,N,p_eq6,p_closed_form,p_montecarlo"
    assert len(lines) == 7
    got = [(float(ln.split(",")[0]), int(ln.split(",")[1])) for ln in lines[1:]]
    assert [n for _, n in got] == [2, 2, 2, 5, 5, 5]
    assert got[0][0] == pytest.approx(0.1)
    assert got[2][0] == pytest.approx(0.3)
    for ln in lines[1:]:
        beta, n, p_eq, p_closed, p_mc = ln.split(",")
        assert float(p_eq) == pytest.approx(float(p_closed), rel=1e-12)
        assert p_mc == "nan"


def test_sweep_monte_carlo_column_and_determinism(tmp_path):
    argv = [
        "sweep-fig1", "--beta", "0.3,0.5", "--n", "2", "--gamma", "0.5",
        "--rho", "1.5", "--mc-samples", "300", "--seed", "3",
    ]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().strip().splitlines()[1:]
    for row in rows:
        p_mc = float(row.split(",")[4])
        assert 0.0 <= p_mc <= 1.0


def test_sweep_parallel_matches_serial(tmp_path):
    # rho=2 keeps every sampled POVM valid across this beta range
    argv = [
        "sweep-fig1", "--beta", "0.2:0.4:0.1", "--n", "2,5",
        "--rho", "2", "--mc-samples", "100", "--seed", "7",
    ]
    serial, par = tmp_path / "serial.csv", tmp_path / "par.csv"
    assert main(argv + ["--out", str(serial)]) == 0
    assert main(argv + ["--parallel", "2", "--out", str(par)]) == 0
    assert serial.read_bytes() == par.read_bytes()


def test_verify_table1_command(tmp_path, capsys):
    rc = main(["verify-table1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.startswith("alice1,alice2,bob,paper_word,oracle_word,status")
    assert "# summary: 64 rows, 64 PASS" in out
    dest = tmp_path / "table.csv"
    rc = main(["verify-table1", "--out", str(dest)])
    out = capsys.readouterr().out
    assert rc == 0
    assert out == "64 rows checked, 0 mismatches\n"
    assert dest.read_text().startswith("alice1,")


def test_eve_command(capsys):
    rc = main(["eve", "--protocol", "teleport"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "protocol: teleport" in out
    assert "leak-free: true" in out
    rc = main([
        "eve", "--protocol", "qis", "--attach", "5",
        "--substitution", "--rounds", "60", "--seed", "1",
    ])
    out = capsys.readouterr().out
    assert rc == 0
    assert "listener attached after qubit: 5" in out
    assert "attack verdict: DISCARD" in out
    assert "honest verdict: ACCEPT" in out


def test_formula_columns_are_backend_independent(tmp_path):
    argv = ["sweep-fig1", "--beta", "0.1:0.5:0.1", "--n", "2,5,10"]
    here = tmp_path / "here.csv"
    assert main(argv + ["--out", str(here)]) == 0
    env = dict(os.environ, CLUSTERSIM_BACKEND="numpy")
    env["PYTHONPATH"] = os.pathsep.join(
        p for p in (os.environ.get("PYTHONPATH"),) if p
    ) or ""
    proc = subprocess.run(
        [sys.executable, "-m", "clustersim.cli"] + argv + ["--out", "-"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout == here.read_text()
