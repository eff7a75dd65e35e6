"""Application settings and configuration management."""
from pydantic_settings import BaseSettings
from functools import lru_cache
import yaml
from pathlib import Path

class Settings(BaseSettings):
    """Application settings from environment variables."""

    # Logging
    LOG_LEVEL: str = "WARNING"

    # Metrics
    METRICS_ENABLED: bool = True

    # Evaluation defaults
    DEFAULT_SEED: int = 20160101
    DEFAULT_EVAL_POINTS: int = 1000

    # Output
    OUTPUT_DIR: str = "."

    class Config:
        env_file = ".env"

@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()

def _load_yaml(name: str) -> dict:
    config_path = Path(__file__).parent / name
    with open(config_path, 'r') as f:
        return yaml.safe_load(f)

@lru_cache()
def get_solver_config() -> dict:
    """Load stiff solver and windowing defaults from YAML."""
    return _load_yaml("solver.yaml")

@lru_cache()
def get_problem_config() -> dict:
    """Load experiment problem defaults from YAML."""
    return _load_yaml("problems.yaml")

@lru_cache()
def get_bench_config() -> dict:
    """Load benchmark suite definitions from YAML."""
    return _load_yaml("bench.yaml")
