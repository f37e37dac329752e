import json
import math

import pytest

from superhc.cli import main


def test_eval_normalized(capsys):
    assert main(["eval", "--dims", "3,0", "--s", "0.5", "--r", "0.4", "--normalized"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["calibrated"] is True
    assert out["value_re"] == pytest.approx(math.sin(0.4) / 0.4, rel=1e-8)


def test_eval_raw(capsys):
    assert main(["eval", "--dims", "0,1", "--s", "0.3", "--r", "0.5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value_im"] == pytest.approx(-1.970134, abs=1e-6)
    assert out["calibrated"] is False


def test_eval_errors(capsys):
    assert main(["eval", "--dims", "2,1", "--s", "1", "--r", "1"]) == 2
    assert main(["eval", "--dims", "4,0", "--s", "1,1", "--r", "0.2,0.3"]) == 2
    assert main(["eval", "--dims", "2,1", "--s", "0.7,0.3", "--r", "0.6,0.8", "--normalized"]) == 1


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nosuchsuite"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--dims", "x"])
    assert exc.value.code == 2


def test_verify_pass_and_out(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code = main(["verify", "harmonic", "--dims", "2,1", "3,2", "--points", "5", "--seed", "4",
                 "--out", str(out), "--format", "csv"])
    assert code == 0
    assert len(out.read_text().strip().splitlines()) == 11


def test_verify_fail_exit_code(capsys):
    assert main(["verify", "calibration", "--dims", "2,1", "--points", "2", "--quiet"]) == 1


def test_verify_tol_override(capsys):
    assert main(["verify", "eigen", "--dims", "3,1", "--points", "3", "--tol", "1e-30",
                 "--quiet"]) == 1


def test_verify_weyl_flags(capsys):
    assert main(["verify", "weyl", "--family", "D", "--rank", "2", "3", "--quiet"]) == 0
    assert "2/2" in capsys.readouterr().out
