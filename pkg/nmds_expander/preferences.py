"""
Run-wide settings.

Values come from an optional nmds.toml in the working directory (or the file
named by NMDS_CONFIG), then from the environment. Nothing here is required:
an empty environment gives the defaults below.

    # nmds.toml
    output_dir = "runs"
    debug = true
    max_enumeration = 1048576
    max_unknowns = 4096
    balance_checks = true
"""

import os
from dataclasses import dataclass, fields, replace
from functools import cache
from pathlib import Path

import tomlkit
from tomlkit.exceptions import ParseError

from .errors import NmdsError
from .paths import DEFAULT_OUTPUT_DIR, get_config_path

_TRUE_STRINGS = {"1", "true", "yes", "on"}


class ConfigError(NmdsError):
    """Raised when nmds.toml cannot be read or holds a bad value."""


@dataclass(frozen=True)
class Preferences:
    output_dir: Path = DEFAULT_OUTPUT_DIR
    debug: bool = False
    # Largest codebook any brute-force oracle may enumerate.
    max_enumeration: int = 1 << 20
    # Largest F1 unknown count for subfield basis elimination.
    max_unknowns: int = 4096
    # Check left weights after every single path reversal.
    balance_checks: bool = True


def _parse_bool(value: str) -> bool:
    return value.strip().lower() in _TRUE_STRINGS


def _read_config_file(path: Path) -> dict[str, object]:
    if not path.is_file():
        return {}

    try:
        document = tomlkit.parse(path.read_text(encoding="utf-8"))
    except (OSError, ParseError) as ex:
        raise ConfigError(f"Could not read {path}: {ex}") from ex

    return document.unwrap()


def _coerce(name: str, value: object) -> object:
    match name:
        case "output_dir":
            return Path(str(value))
        case "debug" | "balance_checks":
            if isinstance(value, str):
                return _parse_bool(value)
            return bool(value)
        case "max_enumeration" | "max_unknowns":
            try:
                number = int(value)  # type: ignore[arg-type]
            except (TypeError, ValueError) as ex:
                raise ConfigError(f"{name} must be an integer, got {value!r}") from ex
            if number <= 0:
                raise ConfigError(f"{name} must be positive, got {number}")
            return number

    raise ConfigError(f"Unknown setting {name!r}")


def load_preferences(config_path: Path | None = None) -> Preferences:
    prefs = Preferences()
    known = {f.name for f in fields(Preferences)}

    values = _read_config_file(config_path or get_config_path())
    for name, value in values.items():
        if name not in known:
            raise ConfigError(f"Unknown setting {name!r}")
        prefs = replace(prefs, **{name: _coerce(name, value)})

    if output_dir := os.getenv("NMDS_OUTPUT_DIR"):
        prefs = replace(prefs, output_dir=Path(output_dir))

    if (debug := os.getenv("NMDS_DEBUG")) is not None:
        prefs = replace(prefs, debug=_parse_bool(debug))

    return prefs


@cache
def get_preferences() -> Preferences:
    return load_preferences()


def reset_preferences():
    get_preferences.cache_clear()
