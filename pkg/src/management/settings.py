from functools import lru_cache
from pathlib import Path

import psutil
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class Settings(BaseSettings):
    cache: Path = Path.home() / ".cache" / "unmix-ae"
    log_level: str = "INFO"
    threads: int = Field(default_factory=_default_threads, ge=1)
    device: str = "cpu"

    defaults_path: Path = Path(__file__).with_name("defaults.yaml")

    model_config = SettingsConfigDict(
        env_prefix="UNMIX_AE_",
        env_file=".env",
        extra="ignore",
    )


@lru_cache
def get_settings() -> Settings:
    return Settings()
