import json

import pytest

from quasikit import cli
from quasikit.catalog import ExperimentConfig
from quasikit.cli import ExitCode
from quasikit.env_vars import EnvVars
from quasikit.errors import ConfigError, ResolutionError
from quasikit.report import ResidualRow, RunReport, load_report


def test_parse_overrides() -> None:
    overrides = cli.parse_overrides(["N=16", "map.name=ellipse_0_8", 'q={"re": 1, "im": 0}', "tolerances.jump=1e-4"])
    assert overrides == {
        "N": 16,
        "map": {"name": "ellipse_0_8"},
        "q": {"re": 1, "im": 0},
        "tolerances": {"jump": 1e-4},
    }
    with pytest.raises(ConfigError, match="not of the form key=value"):
        cli.parse_overrides(["N"])


def test_build_config(config_file, tmp_path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = config_file(map={"kind": "catalog", "name": "ellipse_0_5"}, N=16)
    monkeypatch.setenv(EnvVars.QUASIKIT_OUT, str(tmp_path / "env-out"))

    config = cli.build_config(str(path), ["N=8"])
    assert config.N == 8
    assert config.out == tmp_path / "env-out"

    config = cli.build_config(str(path), out=str(tmp_path / "flag-out"))
    assert config.out == tmp_path / "flag-out"


def test_circle_homeo__unknown_kind() -> None:
    with pytest.raises(ConfigError, match="Circle homeomorphism 'shear' is not supported"):
        cli.circle_homeo({"kind": "shear"})


def test_sample_points__sides(unit_disk, ellipse) -> None:
    assert all(abs(z) < 1 for z in cli.domain_points(unit_disk))
    assert all(abs(z) > 1 for z in cli.complement_points(unit_disk))
    assert cli.normalization_point(ExperimentConfig(), ellipse) == cli.domain_points(ellipse, 1)[0]


def test_exit_code__lowest_failing_suite() -> None:
    report = RunReport(
        command="verify",
        config={},
        kappa_D=1.0,
        residuals=[
            ResidualRow.check("anchor", "bounce", 1.0, 1e-6),
            ResidualRow.check("cauchy", "jump", 1.0, 1e-5),
            ResidualRow.check("grunsky", "symmetry", 0.0, 1e-9),
        ],
    )
    assert cli.exit_code(report) == ExitCode.CAUCHY
    assert cli.exit_code(RunReport(command="verify", config={}, kappa_D=1.0)) == ExitCode.SUCCESS


def test_run__unknown_command() -> None:
    with pytest.raises(ConfigError, match="Command 'weld' is not supported"):
        cli.run("weld", ExperimentConfig())


def test_run__grunsky_on_ellipse() -> None:
    report = cli.run("grunsky", ExperimentConfig(N=32))
    assert report.payload["norm"] == pytest.approx(0.5, abs=1e-9)
    assert [row["N"] for row in report.tables["grunsky_norms"]] == [8, 16, 32]
    assert report.passed


def test_run__faber_residue_row() -> None:
    report = cli.run("faber", ExperimentConfig(N=8))
    assert [(row.suite, row.name) for row in report.residuals] == [("faber", "residue")]
    assert report.payload["residue"] < 1e-10
    assert report.passed


def test_run__quadrature_settings_reach_the_reads() -> None:
    with pytest.raises(ResolutionError, match="cannot hold the coefficient range"):
        cli.run("grunsky", ExperimentConfig(N=32, quadrature={"fft_grid": 16}))
    with pytest.raises(ResolutionError, match="cannot hold the coefficient range"):
        cli.run("classify", ExperimentConfig(N=32, quadrature={"fft_grid": 16}))

    report = cli.run("grunsky", ExperimentConfig(N=16, quadrature={"sampling_radius": 1.2, "fft_grid": 2048}))
    assert report.payload["norm"] == pytest.approx(0.5, abs=1e-9)


def test_run__deterministic_payload() -> None:
    config = ExperimentConfig(N=8)
    assert cli.run("faber", config).payload_json() == cli.run("faber", config).payload_json()


def test_run__approx_ratio() -> None:
    report = cli.run("approx", ExperimentConfig(N=32, params={"orders": [4, 8, 16]}))
    assert report.payload["fitted_ratio"] == pytest.approx(0.3, abs=0.03)
    assert len(report.tables["approximation"]) == 3


def test_main__classify_unit_circle(config_file, tmp_path) -> None:
    path = config_file(map={"kind": "catalog", "name": "unit_circle"}, N=8)
    out = tmp_path / "classify"
    assert cli.main(["classify", "--config", str(path), "--out", str(out)]) == ExitCode.SUCCESS

    report = load_report(out)
    assert report.payload["verdict"] == "quasicircle"
    assert report.payload["norm"] == pytest.approx(0, abs=1e-12)


def test_main__verify_ellipse(config_file, tmp_path) -> None:
    path = config_file(map={"kind": "catalog", "name": "ellipse_0_5"}, N=8)
    out = tmp_path / "verify"
    assert cli.main(["verify", "--config", str(path), "--out", str(out)]) == ExitCode.SUCCESS

    report = load_report(out)
    assert report.payload["passed"]
    suites = {row.suite for row in report.residuals}
    assert suites == {"series", "grunsky", "faber", "schiffer", "anchor", "cauchy", "transmission", "maps"}
    names = {(row.suite, row.name) for row in report.residuals}
    assert {
        ("series", "douglas_calibration"),
        ("grunsky", "q_independence"),
        ("grunsky", "classifier"),
        ("faber", "residue"),
        ("schiffer", "disk_T12"),
        ("schiffer", "moebius_T11"),
        ("maps", "round_trip"),
    } <= names
    assert (out / "residuals.csv").exists()


def test_main__missing_config(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(EnvVars.QUASIKIT_CONFIG, raising=False)
    assert cli.main(["grunsky"]) == ExitCode.ERROR


def test_main__invalid_config(config_file, tmp_path) -> None:
    path = config_file(N=1)
    assert cli.main(["grunsky", "--config", str(path), "--out", str(tmp_path)]) == ExitCode.ERROR

    path = config_file(map={"kind": "catalog", "name": "koch"})
    assert cli.main(["grunsky", "--config", str(path), "--out", str(tmp_path)]) == ExitCode.ERROR


def test_main__diff(config_file, tmp_path, capsys) -> None:
    for N in (8, 16):
        path = config_file(map={"kind": "catalog", "name": "ellipse_0_5"}, N=N)
        assert cli.main(["grunsky", "--config", str(path), "--out", str(tmp_path / f"n{N}")]) == ExitCode.SUCCESS
    capsys.readouterr()

    assert cli.main(["diff", str(tmp_path / "n8"), str(tmp_path / "n16")]) == ExitCode.SUCCESS
    diff = json.loads(capsys.readouterr().out)
    assert diff["config"]["N"] == {"a": 8, "b": 16, "delta": 8}
