import os
from pathlib import Path
from typing import Optional


class EnvVars:
    # run inputs
    QUASIKIT_CONFIG: str = "QUASIKIT_CONFIG"

    # run outputs
    QUASIKIT_OUT: str = "QUASIKIT_OUT"


class MissingEnvironmentVariable(Exception):
    pass


def config_path(flag: Optional[str]) -> Path:
    """The --config flag wins over QUASIKIT_CONFIG; one of them must be given."""
    if flag:
        return Path(flag)
    if EnvVars.QUASIKIT_CONFIG not in os.environ:
        raise MissingEnvironmentVariable(
            f"The environment variable '{EnvVars.QUASIKIT_CONFIG}' is missing. Ensure to export it "
            "or pass --config."
        )
    return Path(os.environ[EnvVars.QUASIKIT_CONFIG])


def output_dir(flag: Optional[str]) -> Optional[Path]:
    if flag:
        return Path(flag)
    if EnvVars.QUASIKIT_OUT in os.environ:
        return Path(os.environ[EnvVars.QUASIKIT_OUT])
    return None
