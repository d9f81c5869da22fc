import os
from typing import Optional

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Parallelism: absent means automatic (one worker per CPU)
    workers: Optional[int] = Field(default=None, ge=1)

    # Exact simulation limits
    dimension_cap: int = Field(default=4096, ge=2)

    # Output
    output_dir: str = "results"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPINPREP_",
        case_sensitive=False,
        extra="ignore",
    )

    @model_validator(mode="after")
    def normalize_log_level(self) -> Self:
        self.log_level = self.log_level.upper()
        return self

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1
