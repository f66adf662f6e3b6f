"""Environment-driven settings (``BIJUX_SPECKLE_*`` variables and ``.env``)."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

ENV_PREFIX = "BIJUX_SPECKLE_"


class SpeckleSettings(BaseSettings):
    """Process-wide defaults; explicit CLI flags and config files take precedence."""

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="ignore")

    output_root: Path = Path("artifacts/runs")
    log_level: str = "INFO"
    structured_logging: bool = False
    mnist_dir: Path | None = None


def load_environment(dotenv_path: str | Path | None = None) -> None:
    """Load a `.env` file when present so settings can see its variables."""
    path = Path(dotenv_path) if dotenv_path else Path(".env")
    if path.exists():
        load_dotenv(dotenv_path=path)


@lru_cache(maxsize=1)
def get_settings() -> SpeckleSettings:
    return SpeckleSettings()


__all__ = ["ENV_PREFIX", "SpeckleSettings", "get_settings", "load_environment"]
