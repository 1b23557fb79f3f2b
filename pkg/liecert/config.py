"""Engine configuration"""
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Engine settings loaded from environment variables (prefix LIECERT_)"""
    seed: int = 0
    prime_count: int = 3
    prime_seed: Optional[int] = None

    # Orbit sampling
    sample_batches: int = 12
    batch_size: int = 8
    plateau_batches: int = 3
    gu_samples: int = 32

    # Budgets
    budget_mem_bytes: int = 4 * 1024 ** 3
    budget_seconds: float = 1800.0

    # Execution
    mode: str = "auto"
    exact_dim_limit: int = 14
    workers: int = 1

    # Storage
    cache_dir: Path = Path.home() / ".cache" / "liecert"
    output: Optional[Path] = None
    ledger: bool = True
    database_url: Optional[str] = None
    timestamps: bool = True

    model_config = {"env_file": ".env", "env_prefix": "LIECERT_", "extra": "ignore", "validate_assignment": True}

    @field_validator(
        "prime_count", "sample_batches", "batch_size", "plateau_batches",
        "gu_samples", "budget_mem_bytes", "budget_seconds", "exact_dim_limit", "workers",
    )
    @classmethod
    def _positive(cls, value, info):
        if value <= 0:
            raise ValueError(f"{info.field_name} must be positive, got {value}")
        return value

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value: str) -> str:
        if value not in ("auto", "exact", "modular"):
            raise ValueError(f"mode must be auto, exact or modular, got {value!r}")
        return value

    @property
    def effective_prime_seed(self) -> int:
        return self.seed if self.prime_seed is None else self.prime_seed

    @property
    def ledger_url(self) -> str:
        if self.database_url:
            return self.database_url
        return f"sqlite:///{Path(self.cache_dir) / 'ledger.db'}"

    @property
    def max_samples(self) -> int:
        return self.sample_batches * self.batch_size


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
