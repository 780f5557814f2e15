"""Configuration management for the subfitness toolkit."""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    log_level: str = Field(default="WARNING")
    log_format: str = Field(default="json")  # json or text
    log_file: Optional[str] = Field(default=None)

    model_config = SettingsConfigDict(env_prefix="SUBFITLAB_", env_file=".env", extra="ignore")


class SweepConfig(BaseSettings):
    """Exhaustive sweep configuration."""

    jobs: int = Field(default=1, ge=1)
    max_lattice_size: int = Field(default=8, ge=1, le=8)
    thm21_max_n: int = Field(default=7, ge=1, le=8)
    thm42_max_n: int = Field(default=6, ge=1, le=8)
    space_max_n: int = Field(default=6, ge=1, le=7)
    union_max_n: int = Field(default=5, ge=1, le=6)

    model_config = SettingsConfigDict(env_prefix="SUBFITLAB_SWEEP_", env_file=".env", extra="ignore")


class SamplingConfig(BaseSettings):
    """Seeded property-run configuration."""

    seed: int = Field(default=20220801)
    samples: int = Field(default=10_000, ge=1)
    closure_samples: int = Field(default=100_000, ge=1)
    support_bound: int = Field(default=30, ge=4)
    min_case_hits: int = Field(default=100, ge=0)

    model_config = SettingsConfigDict(env_prefix="SUBFITLAB_SAMPLING_", env_file=".env", extra="ignore")


class Settings(BaseSettings):
    """Main toolkit settings."""

    app_name: str = Field(default="subfitlab")
    app_version: str = Field(default="0.3.0")
    environment: str = Field(default="development")

    # Sub-configurations
    logging: LoggingConfig = LoggingConfig()
    sweep: SweepConfig = SweepConfig()
    sampling: SamplingConfig = SamplingConfig()

    model_config = SettingsConfigDict(
        env_prefix="SUBFITLAB_",
        env_file=".env",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get toolkit settings instance."""
    return settings
