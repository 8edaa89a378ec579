from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from flatlab.cli import UsageError, main, parse_rational, run
from flatlab.exponents import EPS, EpsExponent


def test_parse_rational_forms():
    assert parse_rational("3/2") == EpsExponent.const("3/2")
    assert parse_rational("8/3+eps") == EpsExponent.const("8/3") + EPS
    assert parse_rational("18/5-eps") == EpsExponent.const("18/5") - EPS
    assert parse_rational("inf") == math.inf
    with pytest.raises(UsageError):
        parse_rational("3/x")


def test_verify_oracle_report_schema():
    status, report, text, _ = run(["verify", "oracle", "--q", "3", "--d", "2"])
    assert status == 0
    data = json.loads(text)
    for key in ("q", "p", "ell", "d", "points_checked", "per_class_max_dev", "pass"):
        assert key in data
    assert data["points_checked"] == 81
    assert data["pass"] is True


def test_csv_output_has_header():
    status, _, text, _ = run(["verify", "gauss", "--qs", "3,5", "--format", "csv"])
    assert status == 0
    reader = csv.DictReader(io.StringIO(text))
    assert reader.fieldnames == ["q", "p", "ell", "d", "quantity", "value", "expected", "pass"]
    rows = list(reader)
    assert {r["q"] for r in rows} == {"3", "5"}


def test_ledger_csv_has_one_row_per_estimate():
    status, report, text, _ = run(["exponents", "derive", "--format", "csv"])
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == len(report.data["ledger"])
    by_key = {r["key"]: r for r in rows}
    assert by_key["interpolated_d3"]["r"] == "72/(20+5*eps)"


def test_exit_codes(capsys):
    assert main(["exponents", "check", "--n", "6", "--p", "2", "--r", "4"]) == 0
    assert main(["exponents", "check", "--n", "6", "--p", "2", "--r", "2"]) == 1
    assert main(["verify", "oracle", "--q", "6", "--d", "2"]) == 2
    assert main(["norms", "extension", "--q", "3", "--d", "2", "--r", "six"]) == 2
    assert main(["no-such-command"]) == 2
    err = capsys.readouterr().err
    assert "error" in err


def test_out_writes_report_and_prints_summary(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["kakeya", "--q", "3", "--d", "2", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "kakeya" in printed and "PASS" in printed
    assert json.loads(out.read_text())["pass"] is True


@pytest.mark.parametrize("argv", [
    ["verify", "identities", "--q", "3", "--d", "2", "--trials", "5"],
    ["norms", "extension", "--q", "5", "--d", "2", "--r", "6", "--restarts", "3", "--iters", "40"],
    ["exponents", "derive"],
    ["sweep", "opnorm", "--d", "2", "--qs", "3,5", "--restarts", "2", "--iters", "30"],
])
def test_reports_are_byte_identical(argv):
    first = run(argv)[2]
    second = run(argv)[2]
    assert first == second


def test_sweep_jobs_do_not_change_report():
    base = ["sweep", "decay", "--d", "2", "--qs", "3,5,7"]
    assert run(base)[2] == run(base + ["--jobs", "2"])[2]


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "flatlab.cli", "exponents", "derive"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
    assert "PASS" in proc.stderr
