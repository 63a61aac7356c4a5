from os import getenv
from pathlib import Path
from typing import Literal

from dotenv import load_dotenv

load_dotenv()

EnvKey = Literal['LAGRANGIAN_OUTPUT_DIR', 'LAGRANGIAN_LOG_LEVEL']

DEFAULT_OUTPUT_DIR = "output"
DEFAULT_LOG_LEVEL = "INFO"


def get_env(key: EnvKey, default: str | None = None) -> str | None:
    """Get environment variable value.

    Args:
        key: Environment variable key
        default: Default value if key not found

    Returns:
        Environment variable value or default
    """
    return getenv(key, default)


def load_env_file(path: str | Path | None) -> None:
    """Load an additional .env file, letting it override the process environment."""
    if path:
        load_dotenv(path, override=True)


def output_dir(override: str | Path | None = None) -> Path:
    """Directory for bundles and tables: explicit override, then LAGRANGIAN_OUTPUT_DIR."""
    if override:
        return Path(override)
    return Path(get_env('LAGRANGIAN_OUTPUT_DIR', DEFAULT_OUTPUT_DIR) or DEFAULT_OUTPUT_DIR)


def log_level() -> str:
    return (get_env('LAGRANGIAN_LOG_LEVEL', DEFAULT_LOG_LEVEL) or DEFAULT_LOG_LEVEL).upper()
