"""
Application settings loaded from environment variables and optional .env file.
"""
from pathlib import Path

from pydantic import model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Project root (rigidchain/)
BASE_DIR = Path(__file__).resolve().parent.parent.parent
ENV_FILE = BASE_DIR / ".env"


class Settings(BaseSettings):
    """Application configuration settings."""

    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE),
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Where `--scene NAME` is looked up when NAME is not a path that exists
    SCENES_DIR: Path = BASE_DIR / "scenes"

    # Motion planning
    TICK_S: float = 0.01
    PATH_SAMPLE_SPACING_M: float = 0.01

    # Coverage / error-map workers; 0 means available parallelism
    JOBS: int = 0

    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    @model_validator(mode="after")
    def check_ranges(self) -> "Settings":
        self.LOG_LEVEL = self.LOG_LEVEL.strip().upper() or "WARNING"
        if self.JOBS < 0:
            raise ValueError("JOBS must be >= 0")
        if self.TICK_S <= 0 or self.PATH_SAMPLE_SPACING_M <= 0:
            raise ValueError("TICK_S and PATH_SAMPLE_SPACING_M must be positive")
        return self


settings = Settings()
