import os
from pathlib import Path

CONFIG_FILE_NAME = "nmds.toml"
DEFAULT_OUTPUT_DIR = Path("out")


def get_config_path() -> Path:
    if config_path := os.getenv("NMDS_CONFIG"):
        return Path(config_path)

    return Path.cwd() / CONFIG_FILE_NAME


def get_output_dir(create=False) -> Path:
    # Don't use a top-level import to prevent a circular dependency
    from .preferences import get_preferences

    path = get_preferences().output_dir
    if create:
        path.mkdir(parents=True, exist_ok=True)

    return path
