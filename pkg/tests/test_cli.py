import json
import subprocess
import sys

import pytest

from bexp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("lit,q,expected", [("(10)^inf", "golden", ["1", "1"]),
                                            ("0^inf", "2", ["0", "0"]),
                                            ("m^inf", "3/2", ["2", "2"])])
def test_eval(capsys, lit, q, expected):
    code, out = run(capsys, "eval", lit, "--q", q, "--m", "1")
    assert code == 0
    assert [str(x) for x in out] == expected


def test_parse_error_has_position(capsys):
    code, out = run(capsys, "eval", "1x", "--q", "2", "--m", "1")
    assert code == 2 and out["ok"] is False and out["position"] == 1


def test_contract_violations(capsys):
    code, out = run(capsys, "--depth", "4", "eval", "0^inf", "--q", "2", "--m", "1")
    assert code == 3 and "depth" in out["message"]
    code, out = run(capsys, "b2", "certify", "--m", "1", "--q", "golden", "--c", "0^inf", "--d", "0^inf")
    assert code == 3 and out["error"] == "GoldenRatioExcluded"


def test_constants_csv(capsys, tmp_path):
    code = main(["--out", str(tmp_path), "--no-timestamp", "--format", "csv", "constants", "1-2"])
    capsys.readouterr()
    assert code == 0
    raw = (tmp_path / "tables" / "constants.csv").read_bytes()
    lines = raw.split(b"\r\n")
    assert lines[0] == b"m,G,G_err,q_f,q_f_err,q_KL,q_KL_err"
    assert lines[1].startswith(b"1,1.6180339887498")
    assert lines[2].startswith(b"2,2,0,2.41421356237309")
    main(["--out", str(tmp_path), "--no-timestamp", "--format", "csv", "constants", "3-2"])
    capsys.readouterr()
    assert (tmp_path / "tables" / "constants.csv").read_bytes().count(b"\r\n") == 1


def test_b2_commands(capsys, tmp_path):
    code, out = run(capsys, "--out", str(tmp_path), "b2", "construct", "--m", "2", "--word", "1", "--kind", "V")
    assert code == 0 and out["q"]["coeffs"] == [-1, -2, 1]
    assert (tmp_path / "certificates" / "V_m2_1.json").exists()
    code, out = run(capsys, "--out", str(tmp_path), "b2", "certify", "--m", "1", "--q", "2",
                    "--c", "0^inf", "--d", "0^inf")
    assert code == 0 and out["residual"] == ["0", "0"]


def test_uniqlang_check(capsys, tmp_path):
    code, out = run(capsys, "--out", str(tmp_path), "uniqlang", "check", "--m", "3", "--c0", "1", "11121")
    assert code == 0 and out["accept"] is True


def test_output_is_deterministic(tmp_path):
    argv = [sys.executable, "-m", "bexp.cli", "--no-timestamp", "--out", str(tmp_path),
            "b2", "construct", "--m", "2", "--word", "1", "--kind", "V"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b
