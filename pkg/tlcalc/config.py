"""
Settings for tolerances, size limits and logging

Values come from a yaml file (``tlcalc.yaml`` in the working directory or the
path in ``TLCALC_CONFIG``) and are then overridden by environment variables.
"""

import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "tlcalc.yaml"

# Environment variable -> (settings field, converter)
ENV_OVERRIDES = {
    "TLCALC_TOLERANCE": ("tolerance", float),
    "TLCALC_MAX_ENTRIES": ("max_entries", int),
    "LOG_LEVEL": ("log_level", str),
}


@dataclass(frozen=True)
class Settings:
    """Process-wide numeric and logging settings"""
    tolerance: float = 1e-9
    exact_tolerance: float = 1e-12
    cross_tolerance: float = 1e-10
    max_entries: int = 10_000_000
    seeds_per_identity: int = 20
    dimensions: List[int] = field(default_factory=lambda: [2, 3, 4, 5])
    log_level: str = "INFO"
    workers: int = 4


_settings: Optional[Settings] = None


def _coerce(name: str, value: Any, converter) -> Any:
    try:
        if converter is list:
            return [int(v) for v in value]
        return converter(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value for setting {name!r}: {value!r} ({e})") from e


def load_settings(path: Optional[str] = None) -> Settings:
    """
    Load settings from yaml and the environment

    Args:
        path: Explicit settings file; falls back to $TLCALC_CONFIG, then ./tlcalc.yaml

    Returns:
        Settings with environment overrides applied
    """
    candidates = [path, os.getenv("TLCALC_CONFIG"), DEFAULT_CONFIG_FILE]
    data: Dict[str, Any] = {}

    for candidate in candidates:
        if not candidate:
            continue
        config_path = Path(candidate)
        if config_path.exists():
            try:
                with open(config_path, "r") as f:
                    data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Cannot parse settings file {config_path}: {e}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"Settings file {config_path} must contain a mapping")
            logger.debug(f"Loaded settings from {config_path}")
            break
        if candidate is path:
            raise ConfigError(f"Settings file does not exist: {config_path}")

    known = {f.name: f for f in fields(Settings)}
    converters = {"tolerance": float, "exact_tolerance": float, "cross_tolerance": float,
                  "max_entries": int, "seeds_per_identity": int, "dimensions": list,
                  "log_level": str, "workers": int}
    values: Dict[str, Any] = {}
    for key, value in data.items():
        if key not in known:
            logger.warning(f"Ignoring unknown setting {key!r}")
            continue
        values[key] = _coerce(key, value, converters[key])

    for env_name, (name, converter) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is not None and raw != "":
            values[name] = _coerce(env_name, raw, converter)

    settings = replace(Settings(), **values)
    if settings.tolerance < 0 or settings.max_entries <= 0:
        raise ConfigError("tolerance must be non-negative and max_entries positive")
    return settings


def get_settings() -> Settings:
    """Cached settings for the current process"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    """Forget cached settings so the next get_settings() reloads them"""
    global _settings
    _settings = None
