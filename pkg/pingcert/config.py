"""Application configuration."""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from the environment (prefix PINGCERT_)."""

    model_config = SettingsConfigDict(
        env_prefix="PINGCERT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    app_name: str = "pingcert"
    log_level: str = "WARNING"

    # Cayley balls
    max_ball_vertices: int = 200_000
    dense_distance_limit: int = 4_000
    geodesic_cap: int = 64

    # delta estimation
    delta_exhaustive_limit: int = 500
    delta_samples: int = 10_000
    default_seed: int = 20240601

    # certification
    oracle_maxlen: int = 12
    oracle_budget: int = 2_000_000
    empirical_path_length: int = 6
    syllable_path_cap: int = 200

    # residual depth search
    quotient_max_degree: int = 7
    quotient_budget: int = 200


@lru_cache
def get_settings() -> Settings:
    """Cached settings instance."""
    return Settings()
