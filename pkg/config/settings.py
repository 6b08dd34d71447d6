"""
Configuration settings for rbdad
"""
from pathlib import Path
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Project paths
    PROJECT_ROOT: Path = Path(__file__).parent.parent
    DATA_DIR: Path = PROJECT_ROOT / "data"
    MODELS_DIR: Path = DATA_DIR / "models"
    PROBLEMS_DIR: Path = DATA_DIR / "problems"
    OUTPUT_DIR: Path = PROJECT_ROOT / "output"
    TAPE_CACHE_DIR: Path = PROJECT_ROOT / ".tape_cache"

    # Application
    APP_NAME: str = "rbdad"
    APP_VERSION: str = "0.1.0"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_TO_FILE: bool = False

    # Reproducibility
    RANDOM_SEED: int = 42

    # Timing harness
    TIMING_REPETITIONS: int = 10000
    TIMING_WARMUP: int = 20
    TIMING_GUARD_RUNS: int = 3
    TIMING_BUDGET_SECONDS: float = 5.0  # per (function, provider) cell

    # Automatic differentiation
    DUAL_CHUNK_SIZE: int = 0  # 0 = all seed directions in one sweep

    # Numerics
    PIVOT_TOLERANCE: float = 1e-12
    MAX_FLOATING_PITCH: float = 1.2  # random test states
    SINGULAR_PITCH: float = 1.35  # Euler singularity guard
    ROLLOUT_STATE_BOUND: float = 1e6

    class Config:
        env_file = ".env"
        case_sensitive = True


# Global settings instance
settings = Settings()


# Create necessary directories
def create_directories():
    """Create required directories if they don't exist"""
    directories = [
        settings.OUTPUT_DIR,
        settings.TAPE_CACHE_DIR,
    ]

    for directory in directories:
        directory.mkdir(parents=True, exist_ok=True)


if __name__ == "__main__":
    create_directories()
    print("Settings loaded successfully")
    print(f"Project Root: {settings.PROJECT_ROOT}")
    print(f"Models: {settings.MODELS_DIR}")
    print(f"Tape cache: {settings.TAPE_CACHE_DIR}")
