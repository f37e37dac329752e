import csv
import json

import pytest

from superhc.errors import UnknownSuite
from superhc.harness import Report, SuiteConfig, emit_report, report_json, run_suite


def test_harmonic_example():
    rep = run_suite(SuiteConfig("harmonic", dims=[(2, 1)], points=10, seed=7))
    assert len(rep.cases) == 10
    assert rep.passed and all(c["residual"] < 1e-7 for c in rep.cases)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        SuiteConfig("unknown")


def test_determinism():
    cfg = dict(dims=[(3, 1), (2, 2)], points=5, seed=3)
    for suite in ("eigen", "berezinian", "grassmann", "calibration"):
        a = run_suite(SuiteConfig(suite, **cfg))
        b = run_suite(SuiteConfig(suite, **cfg))
        assert report_json(a, timing=False) == report_json(b, timing=False)


def test_errors_become_failures():
    rep = run_suite(SuiteConfig("calibration", dims=[(2, 1)], points=3, seed=1))
    assert not rep.passed
    assert rep.cases[0]["error"].startswith("NonConvergent")


def test_json_roundtrip(tmp_path):
    rep = run_suite(SuiteConfig("flat", dims=[(2, 1)], points=4, seed=1))
    path = tmp_path / "r.json"
    emit_report(rep, path, "json")
    back = Report.from_dict(json.loads(path.read_text()))
    assert back.to_dict() == json.loads(path.read_text())
    assert back.passed == rep.passed and back.cases == rep.cases


def test_csv_rows(tmp_path):
    rep = run_suite(SuiteConfig("expansion", dims=[(2, 1), (3, 0)], points=3, seed=1))
    path = tmp_path / "r.csv"
    emit_report(rep, path, "csv")
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["suite", "dims", "case", "residual", "pass"]
    assert len(rows) == len(rep.cases) + 1


def test_empty_report(tmp_path):
    rep = run_suite(SuiteConfig("harmonic", dims=[(2, 1)], points=0, seed=1))
    assert rep.cases == [] and rep.passed
    path = tmp_path / "e.json"
    emit_report(rep, path, "json")
    assert json.loads(path.read_text())["aggregate"]["pass"] is True


def test_tolerance_validation():
    with pytest.raises(ValueError):
        SuiteConfig("eigen", tolerances={"eigen": 0})


def test_seed_env(monkeypatch):
    monkeypatch.setenv("SUPERHC_SEED", "321")
    assert SuiteConfig("eigen").seed == 321


def test_fd_mode_uses_loose_tolerance():
    cfg = SuiteConfig("harmonic", dims=[(4, 2)], points=5, seed=2, mode="fd")
    assert cfg.tol == 1e-4
    assert run_suite(cfg).passed


def test_weyl_and_mc_small():
    rep = run_suite(SuiteConfig("weyl", systems=[("B", 2), ("C", 1)], points=5, seed=1))
    assert rep.passed and len(rep.cases) == 2
    rep = run_suite(SuiteConfig("mc", groups=["so3"], points=2, n=20_000, seed=1))
    assert len(rep.cases) == 2
    assert {"mean_re", "mean_im", "stderr", "z"} <= set(rep.cases[0]["extra"])
