"""
Configuration Management

Uses Pydantic Settings for type-safe environment variable handling.
Every variable is read with the ``SPECTRALFIELD_`` prefix.
"""

import logging
import os
from functools import lru_cache
from typing import Literal

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Lab settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SPECTRALFIELD_",
        env_file=".env" if os.path.exists(".env") else None,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Reproducibility
    seed: int | None = None  # overrides the config file seed when set

    # Runtime
    workers: int = 0  # 0 = all available cores
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "json"

    # Resource budgets
    dense_budget: int = 4096  # largest dense covariance matrix side
    memory_budget_mb: int = 2048

    # Quadrature
    quadrature_tolerance: float = 1e-10
    quadrature_max_depth: int = 40
    quadrature_max_levels: int = 7
    kernel_tolerance: float = 1e-8
    kernel_grid_max: int = 4096

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Ensure the log level is a standard logging name."""
        level = v.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"log_level must be a logging level name, got {v!r}")
        return level

    @field_validator("workers", "quadrature_max_depth", "quadrature_max_levels")
    @classmethod
    def validate_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be >= 0")
        return v

    @field_validator("dense_budget", "memory_budget_mb", "kernel_grid_max")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("must be > 0")
        return v

    @field_validator("quadrature_tolerance", "kernel_tolerance")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")
        return v

    @property
    def n_jobs(self) -> int:
        """Worker count in joblib convention (-1 = all cores)."""
        return -1 if self.workers == 0 else self.workers

    @property
    def memory_budget_bytes(self) -> int:
        return self.memory_budget_mb * 1024 * 1024


@lru_cache
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Uses lru_cache to ensure settings are only loaded once.
    """
    return Settings()
