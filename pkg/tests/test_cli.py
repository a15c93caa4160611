from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from antiorb import __version__
from antiorb.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_PASS, EXIT_USAGE, RunConfig, UsageError, run
from antiorb.finitefield import get_field
from antiorb.quiver import GradedDims
from antiorb.transform import FuncTable, fourier, quiver_space


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_kloosterman_command(capsys):
    code, rep = call(capsys, "kloosterman", "--m", "2", "--q", "3", "--lambda", "1")
    assert code == EXIT_PASS
    assert rep["result"]["value"] == "-1"
    assert rep["result"]["bound_ok"] is True
    assert rep["version"] == __version__
    assert rep["config"]["m"] == 2 and rep["config"]["p"] == 3


def test_biorbital_command(capsys):
    code, rep = call(capsys, "biorbital", "--m", "2", "--dims", "1,1", "--q", "3", "--eps", "+1", "--json")
    assert code == EXIT_PASS
    res = rep["result"]
    assert (res["dimension"], res["aperiodic_count"], res["match"]) == (2, 2, True)


def test_reports_are_byte_identical(capsys):
    run(["verify-commutation", "--kind", "induction", "--m", "2", "--q", "3", "--parts", "1,1;1,1", "--seed", "4"])
    first = capsys.readouterr().out
    run(["verify-commutation", "--kind", "induction", "--m", "2", "--q", "3", "--parts", "1,1;1,1", "--seed", "4"])
    assert capsys.readouterr().out == first
    assert json.loads(first)["result"]["colinear"] is True


def test_usage_errors(capsys):
    assert run(["kloosterman", "--m", "2", "--q", "4", "--lambda", "1"]) == EXIT_USAGE
    assert run(["biorbital", "--m", "2", "--dims", "1", "--q", "3"]) == EXIT_USAGE
    assert run(["kloosterman", "--m", "2", "--q", "3", "--lambda", "0"]) == EXIT_USAGE
    assert run(["nonsense"]) == EXIT_USAGE
    assert run(["orbits", "--m", "2", "--dims", "1,1", "--q", "3", "--budget", "0"]) == EXIT_USAGE
    capsys.readouterr()


def test_budget_exit_code(capsys):
    code, rep = call(capsys, "orbits", "--m", "2", "--dims", "2,2", "--q", "3", "--budget", "100")
    assert code == EXIT_BUDGET
    assert rep["error"]["budget"] == 100 and rep["error"]["needed"] == 3**8


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("ANTIORB_BUDGET", "50")
    code, _ = call(capsys, "biorbital", "--m", "2", "--dims", "2,1", "--q", "3")
    assert code == EXIT_BUDGET


def test_decompose_and_orbits(capsys):
    code, rep = call(capsys, "decompose", "--m", "2", "--dims", "1,1", "--q", "3", "--coords", "1,0")
    assert code == EXIT_PASS
    assert rep["result"]["label"]["nilpotent_part"] == [[0, 2, 1]]
    code, rep = call(capsys, "orbits", "--m", "2", "--dims", "1,1", "--q", "3", "--nilpotent")
    assert code == EXIT_PASS
    assert rep["result"]["count"] == 3 and rep["result"]["total_points"] == 5


def test_fourier_round_trip_through_files(tmp_path, capsys):
    F = get_field(3)
    space = quiver_space(F, GradedDims(2, (1, 1)), 1)
    f = FuncTable.indicator(space, np.array([0, 4]))
    for suffix in (".json", ".aorb"):
        src, dst = tmp_path / f"f{suffix}", tmp_path / f"g{suffix}"
        src.write_bytes(f.to_bytes()) if suffix == ".aorb" else src.write_text(json.dumps(f.to_json()))
        code, rep = call(capsys, "fourier", "--in", str(src), "--out", str(dst))
        assert code == EXIT_PASS
        blob = dst.read_bytes()
        g = FuncTable.from_bytes(blob) if suffix == ".aorb" else FuncTable.from_json(json.loads(blob))
        assert g == fourier(f)


def test_induce_command(capsys, tmp_path):
    out = tmp_path / "ind.json"
    code, rep = call(capsys, "induce", "--m", "2", "--q", "3", "--parts", "1,0;0,1", "--table-out", str(out))
    assert code == EXIT_PASS
    assert rep["result"]["value_at_zero"] == "1"
    assert out.exists()


def test_case_commands(capsys):
    code, rep = call(capsys, "case", "quadric", "--q", "3", "--n", "4")
    assert code == EXIT_PASS and rep["result"]["f0_at_zero"] == 4
    code, rep = call(capsys, "case", "symmetric", "--q", "3")
    assert code == EXIT_PASS and rep["status"] == "exploratory"
    code, rep = call(capsys, "case", "quadric", "--q", "9", "--n", "3")
    assert code == EXIT_USAGE


def test_accept_all_subset(capsys):
    code, rep = call(capsys, "accept-all", "--profile", "desk", "--only", "3,6")
    assert code == EXIT_PASS
    assert [c["criterion"] for c in rep["result"]["criteria"]] == [3, 6]
    assert run(["accept-all", "--only", "99"]) == EXIT_USAGE


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(command="x", budget=0)
    with pytest.raises(UsageError):
        RunConfig(command="x", m=2, dims=[1])
    assert RunConfig(command="x", m=2, dims=[1, 1], eps=1).to_json()["dims"] == [1, 1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "antiorb.cli", "kloosterman", "--m", "1", "--q", "5", "--lambda", "2"], capture_output=True, text=True)
    assert proc.returncode == EXIT_PASS
    assert json.loads(proc.stdout)["result"]["bound_ok"] is True
