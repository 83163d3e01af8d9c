"""The settings for tsvar."""

import os
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

from .constants import (
    DEFAULT_HELMHOLTZ_TRIALS,
    DEFAULT_MULTISTART,
    DENSE_EL_TOLERANCE,
    EL_TOLERANCE,
    NEWTON_GRADIENT_TOLERANCE,
    NEWTON_MAX_ITER,
)


class Settings(BaseSettings):
    """Settings for tsvar."""

    LOG_FILE: str | None = None
    LOG_LEVEL: str = "WARNING"
    EL_TOLERANCE: float = EL_TOLERANCE
    DENSE_EL_TOLERANCE: float = DENSE_EL_TOLERANCE
    NEWTON_MAX_ITER: int = NEWTON_MAX_ITER
    NEWTON_GRADIENT_TOLERANCE: float = NEWTON_GRADIENT_TOLERANCE
    MULTISTART: int = DEFAULT_MULTISTART
    HELMHOLTZ_TRIALS: int = DEFAULT_HELMHOLTZ_TRIALS
    SEED: int = 0

    model_config = SettingsConfigDict(
        env_file=Path(__file__).parent / f"config/{os.environ.get('TSVAR_CONFIG_FILE', 'default')}.env",
        env_prefix="TSVAR_",
        case_sensitive=True,
    )


settings = Settings()
