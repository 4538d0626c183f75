from pathlib import Path

import pytest

from quasikit import env_vars


def test_config_path__flag_wins(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(env_vars.EnvVars.QUASIKIT_CONFIG, "from-env.json")
    assert env_vars.config_path("from-flag.json") == Path("from-flag.json")


def test_config_path__from_env(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(env_vars.EnvVars.QUASIKIT_CONFIG, "from-env.json")
    assert env_vars.config_path(None) == Path("from-env.json")


def test_config_path__missing(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(env_vars.EnvVars.QUASIKIT_CONFIG, raising=False)
    with pytest.raises(
        env_vars.MissingEnvironmentVariable,
        match="The environment variable 'QUASIKIT_CONFIG' is missing. Ensure to export it or pass --config.",
    ):
        env_vars.config_path(None)


def test_output_dir(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(env_vars.EnvVars.QUASIKIT_OUT, raising=False)
    assert env_vars.output_dir(None) is None

    monkeypatch.setenv(env_vars.EnvVars.QUASIKIT_OUT, "runs")
    assert env_vars.output_dir(None) == Path("runs")
    assert env_vars.output_dir("elsewhere") == Path("elsewhere")
