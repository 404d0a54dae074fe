"""Command-line runner: formats, determinism, configuration and exit codes."""

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from phasesens.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    TABLE_COLUMNS,
    RunConfig,
    fmt,
    main,
    run,
)
from phasesens.sensitivity import table1


def invoke(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestCommands:
    def test_table1_csv(self, capsys):
        status, out, _ = invoke(capsys, "table1", "--n", "10", "--format", "csv")
        assert status == EXIT_OK
        assert out.splitlines()[0] == ",".join(TABLE_COLUMNS)
        rows = parse_csv(out)
        assert len(rows) == 6
        for row, entry in zip(rows, table1(10)):
            assert float(row["dphi0_sq"]) == pytest.approx(entry.figure.dphi0_sq, rel=1e-11)
            assert float(row["width_sq"]) == pytest.approx(entry.figure.width_sq, rel=1e-11)
            assert row["regime"] == entry.regime.value

    def test_curve(self, capsys):
        status, out, _ = invoke(
            capsys, "curve", "--topology", "single", "--scheme", "threshold", "--n", "10",
            "--phi-min", "-0.5", "--phi-max", "0.5", "--phi-steps", "101",
        )
        assert status == EXIT_OK
        rows = parse_csv(out)
        assert len(rows) == 101
        assert list(rows[0]) == ["phi", "dphi_sq", "gain", "var_y", "flag"]
        peak = [r for r in rows if float(r["phi"]) == 0.0][0]
        assert float(peak["dphi_sq"]) == pytest.approx(1 / 880, rel=1e-11)
        assert {r["flag"] for r in rows} == {"ok"}

    def test_verify(self, capsys):
        status, out, _ = invoke(capsys, "verify", "--fock-dim", "80")
        rows = parse_csv(out)
        assert status == EXIT_OK
        assert rows and all(r["passed"] == "true" for r in rows)

    def test_readout(self, capsys):
        status, out, _ = invoke(capsys, "readout", "--gt", "1", "--format", "json")
        assert status == EXIT_OK
        assert json.loads(out)[0]["delta_meas_sq"] == 0.125

    def test_optimize(self, capsys):
        status, out, _ = invoke(capsys, "optimize", "--topology", "two", "--squeeze", "anti", "--n", "10")
        row = parse_csv(out)[0]
        assert status == EXIT_OK
        assert float(row["alpha_sq"]) == pytest.approx(120 / 22, rel=1e-6)
        assert float(row["width_sq"]) == pytest.approx((math.pi / 2) ** 2, rel=1e-9)

    def test_tradeoff(self, capsys):
        status, out, _ = invoke(capsys, "tradeoff", "--n", "100")
        assert status == EXIT_OK
        assert len(parse_csv(out)) == 6

    def test_explicit_state(self, capsys):
        status, out, _ = invoke(
            capsys, "curve", "--topology", "two", "--alpha", "2", "--r", "0", "--phi-min", "0", "--phi-max", "1",
            "--phi-steps", "2", "--format", "json",
        )
        data = json.loads(out)
        assert status == EXIT_OK
        assert data[0]["dphi_sq"] == pytest.approx(1 / 16)


class TestFormats:
    def test_json_null_for_no_sensitivity(self, capsys):
        status, out, _ = invoke(
            capsys, "curve", "--scheme", "threshold", "--phi-min", "0", "--phi-max", str(math.pi / 4),
            "--phi-steps", "2", "--format", "json",
        )
        data = json.loads(out)
        assert status == EXIT_OK
        assert data[1]["flag"] == "nosens" and data[1]["dphi_sq"] is None

    def test_csv_inf_text(self, capsys):
        _, out, _ = invoke(capsys, "curve", "--scheme", "threshold", "--phi-min", "0",
                           "--phi-max", str(math.pi / 4), "--phi-steps", "2")
        assert parse_csv(out)[1]["dphi_sq"] == "inf"

    def test_byte_determinism(self, capsys):
        args = ("table1", "--n", "7", "--format", "json")
        assert invoke(capsys, *args)[1] == invoke(capsys, *args)[1]

    def test_csv_round_trip(self, capsys):
        _, out, _ = invoke(capsys, "curve", "--topology", "two", "--scheme", "threshold", "--phi-steps", "11")
        for row in parse_csv(out):
            for key in ("phi", "dphi_sq", "gain", "var_y"):
                assert fmt(float(row[key])) == row[key]

    def test_twelve_significant_digits(self):
        assert fmt(1 / 3) == "0.333333333333"
        assert fmt(True) == "true"
        assert fmt(None) == ""

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "t.csv"
        status, out, _ = invoke(capsys, "table1", "--n", "5", "-o", str(path))
        assert status == EXIT_OK and out == ""
        assert len(parse_csv(path.read_text())) == 6


class TestConfig:
    def test_config_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"n": 10, "scheme": "threshold", "phi-steps": 3, "phi_min": -0.1, "phi_max": 0.1}))
        _, out, _ = invoke(capsys, "curve", "--config", str(cfg))
        assert len(parse_csv(out)) == 3
        _, out, _ = invoke(capsys, "curve", "--config", str(cfg), "--phi-steps", "5")
        rows = parse_csv(out)
        assert len(rows) == 5
        assert float(rows[2]["dphi_sq"]) == pytest.approx(1 / 880, rel=1e-11)

    @pytest.mark.parametrize("argv", [
        ["curve", "--phi-min", "1", "--phi-max", "0"],
        ["curve", "--phi-steps", "0"],
        ["curve", "--n", "-1"],
        ["curve", "--topology", "single", "--squeeze", "anti"],
        ["curve", "--topology", "single", "--R", "0.3"],
        ["tradeoff", "--n", "2"],
        ["readout", "--gt", "0"],
        ["verify", "--fock-dim", "2"],
    ])
    def test_config_errors(self, capsys, argv):
        status, out, err = invoke(capsys, *argv)
        assert status == EXIT_CONFIG
        assert out == "" and "config error" in err

    def test_bad_config_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"colour": "blue"}')
        assert invoke(capsys, "table1", "--config", str(bad))[0] == EXIT_CONFIG
        assert invoke(capsys, "table1", "--config", str(tmp_path / "missing.json"))[0] == EXIT_CONFIG
        bad.write_text('{"phi_steps": 2.5}')
        assert invoke(capsys, "curve", "--config", str(bad))[0] == EXIT_CONFIG

    def test_argparse_errors_use_config_status(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["curve", "--scheme", "photon-counting"])
        assert info.value.code == EXIT_CONFIG

    def test_numeric_failure(self, capsys):
        status, _, err = invoke(capsys, "curve", "--alpha", "0", "--r", "0", "--scheme", "threshold")
        assert status == EXIT_NUMERIC
        assert "numeric failure" in err

    def test_truncation_failure(self, capsys):
        status, _, err = invoke(capsys, "verify", "--fock-dim", "10")
        assert status == EXIT_NUMERIC

    def test_run_returns_text(self):
        status, text = run(RunConfig("readout", gt=2.0))
        assert status == EXIT_OK and text.startswith("gt,")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "phasesens.cli", "readout"], capture_output=True, text=True, check=True
    )
    assert proc.stdout.splitlines()[1].endswith(",0.125")
