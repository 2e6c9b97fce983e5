import csv
import io
import json

import pytest

from qcheque import cli
from qcheque.cli import EXIT_OK, EXIT_SELFCHECK, EXIT_USAGE, main


def _json(capsys, argv):
    assert main(argv + ["--format", "json"]) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def test_table1_json(capsys):
    rep = _json(capsys, ["table1"])
    assert rep["command"] == "table1" and "timestamp" in rep and rep["config"]["seed"] == 2017
    runs = [r for r in rep["rows"] if r["kind"] == "run"]
    sims = [r for r in rep["rows"] if r["kind"] == "simulation"]
    assert [r["shots"] for r in sims] == [1024, 4096, 8192]
    assert all(0.84 <= r["p0"] <= 0.87 for r in sims)
    assert all(0.73 <= r["p0"] <= 0.78 for r in runs)
    assert all(r["p0"] + r["p1"] == pytest.approx(1) for r in rep["rows"])


def test_table2_json(capsys):
    rep = _json(capsys, ["table2"])
    sims = [r for r in rep["rows"] if r["kind"] == "simulation"]
    runs = [r for r in rep["rows"] if r["kind"] == "run"]
    assert all(r["p0"] == 1.0 for r in sims)
    assert all(0.80 <= r["p0"] <= 0.87 for r in runs)


def test_table_single_shot_count_and_noise_none(capsys):
    rep = _json(capsys, ["table2", "--shots", "4096", "--noise", "none"])
    assert {r["shots"] for r in rep["rows"]} == {4096}
    assert all(r["p0"] == 1.0 for r in rep["rows"])


def test_table_text_and_csv(capsys):
    assert main(["table1"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "Simulation-3 (8192)" in text and "self-check" in text and "PASS" in text
    assert main(["table1", "--format", "csv"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 6 and set(rows[0]) == {"label", "kind", "shots", "p0", "p1"}


def test_determinism(capsys):
    a = _json(capsys, ["table1", "--seed", "7"])["rows"]
    b = _json(capsys, ["table1", "--seed", "7"])["rows"]
    assert a == b


def test_tomography_cheque(capsys):
    rep = _json(capsys, ["tomography", "cheque"])
    t = rep["matrices"]["theoretical"]
    assert t["re"][0][0] == pytest.approx(0.85355, abs=1e-5)
    assert t["re"][0][1] == pytest.approx(0.35355, abs=1e-5)
    s = rep["matrices"]["simulated"]
    assert s["re"][0][0] == pytest.approx(0.852, abs=0.02)
    assert rep["comparisons"]["simulated_vs_theoretical"]["fidelity"] < 1


def test_tomography_ancilla(capsys):
    rep = _json(capsys, ["tomography", "ancilla", "--shots", "8192"])
    s = rep["matrices"]["simulated"]
    assert s["re"][0][0] == pytest.approx(1, abs=0.01) and s["re"][1][1] == pytest.approx(0, abs=0.01)
    assert abs(complex(s["re"][0][1], s["im"][0][1])) < 0.02
    assert rep["matrices"]["theoretical"]["re"] == [[1, 0], [0, 0]]


def test_e2e_outcomes(capsys, tmp_path):
    log = tmp_path / "log.jsonl"
    cases = {"none": "OK", "serial": "UnknownSerial", "signature": "BadSignature"}
    for tamper, reason in cases.items():
        rep = _json(capsys, ["e2e", "--tamper", tamper, "--log", str(log)])
        assert rep["outcome"]["reason"] == reason
    rep = _json(capsys, ["e2e", "--tamper", "double_spend", "--log", str(log)])
    assert [o["reason"] for o in rep["outcomes"]] == ["OK", "AlreadySpent"]
    rep = _json(capsys, ["e2e", "--tamper", "amount", "--mode", "hashed", "--log", str(log)])
    assert rep["outcome"]["reason"].startswith("SwapTestAmountFailed(")
    lines = [json.loads(x) for x in log.read_text().splitlines()]
    assert lines and set(lines[0]) == {"seq", "from", "to", "kind", "payload"}


def test_e2e_text(capsys, tmp_path):
    assert main(["e2e", "--m", "1", "--log", str(tmp_path / "m.jsonl")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "accepted=True reason=OK" in out and "m.jsonl" in out


def test_out_file_and_dump_circuit(capsys, tmp_path):
    out = tmp_path / "t2.json"
    assert main(["table2", "--format", "json", "--out", str(out), "--dump-circuit"]) == EXIT_OK
    assert capsys.readouterr().out == ""
    rep = json.loads(out.read_text())
    assert rep["circuit"].splitlines()[0] == "H 0"
    assert "MEASURE 0 Z" in rep["circuit"]


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 11\nshots = 1024\np1 = 0\np2 = 0\np_read = 0.5\n")
    rep = _json(capsys, ["table2", "--config", str(cfg)])
    assert rep["config"]["seed"] == 11 and rep["config"]["noise"] == "custom"
    assert rep["config"]["noise_params"] == {"p1": 0.0, "p2": 0.0, "p_read": 0.5}
    run = [r for r in rep["rows"] if r["kind"] == "run"][0]
    assert run["p0"] == pytest.approx(0.5, abs=0.08)
    # flags win over the file
    assert _json(capsys, ["table2", "--config", str(cfg), "--seed", "3"])["config"]["seed"] == 3


def test_noise_file(capsys, tmp_path):
    f = tmp_path / "noise.txt"
    f.write_text("p1 = 0\np2 = 0\np_read = 0\n")
    rep = _json(capsys, ["table1", "--noise", f"file={f}"])
    assert rep["config"]["noise_params"] == {"p1": 0.0, "p2": 0.0, "p_read": 0.0}


@pytest.mark.parametrize(
    "argv",
    [
        ["table1", "--shots", "1000"],
        ["table1", "--noise", "loud"],
        ["table2", "--noise", "file=/nonexistent/noise.txt"],
        ["e2e", "--m", "0"],
        ["e2e", "--reps", "0"],
        ["tomography", "cheque", "--shots", "-1"],
    ],
)
def test_usage_errors_return_one(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["table3"], ["tomography", "bank"], ["e2e", "--tamper", "forge"]])
def test_argparse_errors_exit_one(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


def test_bad_config_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("seed 5\n")
    assert main(["table1", "--config", str(cfg)]) == EXIT_USAGE


def test_self_check_failure_exit_code(monkeypatch, capsys):
    # move the analytic target far from what the simulator produces
    monkeypatch.setattr(cli, "ideal_p0", lambda which: 0.5)
    assert main(["table1"]) == EXIT_SELFCHECK
    assert "FAIL" in capsys.readouterr().out
