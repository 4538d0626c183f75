import json

import numpy as np
import pytest

from quasikit import report
from quasikit.errors import IncompatibleReportsError
from quasikit.report import ResidualRow, RunReport


def _report(command: str = "grunsky", N: int = 8, norm: float = 0.5, residual: float = 1e-12) -> RunReport:
    return RunReport(
        command=command,
        config={"map": {"kind": "catalog", "name": "ellipse_0_5"}, "N": N},
        kappa_D=1.0,
        payload={"norm": norm, "label": "x"},
        residuals=[ResidualRow.check("grunsky", "symmetry", residual, 1e-9)],
        tables={"grunsky_norms": [{"N": N, "norm": norm}]},
    )


def test_to_jsonable() -> None:
    data = {1: np.complex128(1 - 2j), "a": np.arange(2), "b": (np.float32(0.5), np.bool_(True))}
    assert report.to_jsonable(data) == {"1": {"re": 1.0, "im": -2.0}, "a": [0, 1], "b": [0.5, True]}


def test_residual_row__check() -> None:
    assert ResidualRow.check("cauchy", "jump", 1e-7, 1e-5).passed
    failing = ResidualRow.check("cauchy", "jump", np.float64(1e-3), 1e-5)
    assert not failing.passed
    assert isinstance(failing.value, float)


def test_run_report__failing_suites() -> None:
    run = _report()
    run.residuals += [ResidualRow.check("cauchy", "jump", 1.0, 1e-5), ResidualRow.check("anchor", "bounce", 1.0, 1e-6)]
    assert not run.passed
    assert run.failing_suites == ["anchor", "cauchy"]


def test_run_report__write_and_load(tmp_path) -> None:
    run = _report()
    path = run.write(tmp_path / "out")
    assert path.name == "report.json"
    assert (tmp_path / "out" / "residuals.csv").read_text().startswith("suite,name,value,tolerance,passed")
    assert (tmp_path / "out" / "grunsky_norms.csv").exists()
    assert json.loads(path.read_text())["payload"]["norm"] == 0.5

    loaded = report.load_report(tmp_path / "out")
    assert loaded.payload_json() == run.payload_json()
    assert loaded.residuals[0].passed


def test_diff_reports__numeric_delta() -> None:
    diff = report.diff_reports(_report(N=8, norm=0.4), _report(N=16, norm=0.5))
    assert diff.config["N"] == {"a": 8, "b": 16, "delta": 8}
    assert diff.payload["norm"]["delta"] == pytest.approx(0.1)
    assert "label" not in diff.payload
    assert not diff.empty


def test_diff_reports__identical() -> None:
    assert report.diff_reports(_report(), _report()).empty


def test_diff_reports__incompatible() -> None:
    with pytest.raises(IncompatibleReportsError, match="'grunsky' report against a 'faber' report"):
        report.diff_reports(_report(), _report(command="faber"))

    other = _report()
    other.config["map"] = {"kind": "catalog", "name": "ellipse_0_8"}
    with pytest.raises(IncompatibleReportsError, match="different maps"):
        report.diff_reports(_report(), other)
