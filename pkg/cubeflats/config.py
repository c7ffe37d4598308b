from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings and configuration."""

    # Application Setup
    APP_NAME: str = "cubeflats"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = "Exact toolkit for CAT(0) cube complexes, flat development and singular cone surfaces"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"

    # Cache Layer Capacity
    CACHE_MAX_SIZE: int = 256  # entries, LRU evicted

    # Command Defaults
    DEFAULT_DEVELOP_RADIUS: int = 3
    DEFAULT_CONE_RADIUS: int = 4
    DEFAULT_DOUBLES_LIMIT: int = 8
    SYMMETRY_PATCH_RADIUS: int = 2

    # Search Bounds
    WITNESS_GRID_ESCALATIONS: int = 6  # refinements of the rational witness grid
    WORD_SEARCH_BOUND: int = 16  # longest automorphism word accepted
    NIELSEN_STATE_LIMIT: int = 200_000
    MAX_SPHERE_DIM: int = 6

    # Output Formatting
    JSON_INDENT: int = 2

    # Pydantic v2 Modern Configuration Management
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


@lru_cache
def get_settings() -> Settings:
    """Provides a thread-safe, cached singleton instance of application settings."""
    return Settings()
