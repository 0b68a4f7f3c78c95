"""Layered settings for hyperstab runs."""

import logging
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

try:
    import tomllib  # Python 3.11+
except ImportError:
    import tomli as tomllib  # Fallback for Python <3.11

logger = logging.getLogger(__name__)


@dataclass
class Settings:
    """Run settings.

    Priority (highest to lowest):
    1. CLI flags (explicit overrides)
    2. Environment variables
    3. User config file (~/.config/hyperstab/config.toml)
    4. Default values
    """

    # Capacity bounds
    max_vertices: int = 24
    max_qudits: int = 4096
    max_terminals: int = 8
    oracle_max_dimension: int = 2**20

    # Worker processes, None = available cores
    jobs: Optional[int] = None

    # Simulation defaults
    prime: int = 2
    trials: int = 1000
    seed: int = 0
    delta: float = 0.3


_INT_KEYS = ("max_vertices", "max_qudits", "max_terminals", "oracle_max_dimension", "jobs", "prime", "trials", "seed")

ENV_VARS = {
    "HYPERSTAB_MAX_VERTICES": "max_vertices",
    "HYPERSTAB_MAX_QUDITS": "max_qudits",
    "HYPERSTAB_MAX_TERMINALS": "max_terminals",
    "HYPERSTAB_ORACLE_MAX_DIMENSION": "oracle_max_dimension",
    "HYPERSTAB_JOBS": "jobs",
}


def _coerce(key: str, value: Any) -> Any:
    """Convert a raw value to the field's type; raises ValueError/TypeError."""
    if key in _INT_KEYS:
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise ValueError(f"{key} must be an integer, got {value!r}")
        coerced = int(value)
        if coerced < 0 or (coerced == 0 and key != "seed"):
            raise ValueError(f"{key} must be positive, got {coerced}")
        return coerced
    if key == "delta":
        coerced = float(value)
        if not coerced > 0:
            raise ValueError(f"delta must be positive, got {coerced}")
        return coerced
    raise KeyError(key)


def _valid_entries(source: str, data: Dict[str, Any]) -> Dict[str, Any]:
    known = {f.name for f in fields(Settings)}
    config: Dict[str, Any] = {}
    for key, value in data.items():
        if key not in known:
            logger.debug(f"Ignoring unknown setting '{key}' from {source}")
            continue
        try:
            config[key] = _coerce(key, value)
        except (TypeError, ValueError) as e:
            logger.debug(f"Ignoring invalid setting '{key}' from {source}: {e}")
    return config


def default_config_paths() -> list[Path]:
    """Config file locations, first existing one wins."""
    return [
        Path.home() / ".config" / "hyperstab" / "config.toml",
        Path.home() / ".hyperstab" / "config.toml",
        Path.cwd() / ".hyperstab.toml",
    ]


def load_config_file(config_path: Optional[Path] = None) -> Dict[str, Any]:
    """Load the ``[hyperstab]`` table of a TOML config file.

    Args:
        config_path: Explicit config file path, or None to use default locations

    Returns:
        Dictionary of valid settings (empty dict if no file is found)
    """
    if config_path is None:
        config_path = next((p for p in default_config_paths() if p.exists()), None)

    if config_path is None or not config_path.exists():
        return {}

    try:
        with open(config_path, "rb") as f:
            data = tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        logger.debug(f"Ignoring unreadable config file {config_path}: {e}")
        return {}
    section = data.get("hyperstab", {})
    if not isinstance(section, dict):
        logger.debug(f"Ignoring non-table [hyperstab] entry in {config_path}")
        return {}
    logger.debug(f"Loaded settings from {config_path}")
    return _valid_entries(str(config_path), section)


def load_from_env() -> Dict[str, Any]:
    """Load capacity and worker settings from ``HYPERSTAB_*`` environment variables."""
    raw = {key: os.environ[var] for var, key in ENV_VARS.items() if os.environ.get(var)}
    return _valid_entries("environment", raw)


def merge_configs(*configs: Dict[str, Any]) -> Dict[str, Any]:
    """Merge multiple config dictionaries (later configs override earlier ones)."""
    merged: Dict[str, Any] = {}
    for config in configs:
        merged.update({k: v for k, v in config.items() if v is not None})
    return merged


def get_settings(
    config_file: Optional[Path] = None,
    cli_overrides: Optional[Dict[str, Any]] = None,
) -> Settings:
    """Merged settings from defaults, config file, environment and CLI flags.

    CLI overrides are trusted (typer validated them already).

    Examples:
        >>> get_settings().max_vertices
        24
        >>> get_settings(cli_overrides={"jobs": 4}).jobs
        4
    """
    merged = merge_configs(load_config_file(config_file), load_from_env(), cli_overrides or {})
    return Settings(**merged)


def create_example_config() -> str:
    """Example configuration file content."""
    return """\
# hyperstab configuration
# Save this file as: ~/.config/hyperstab/config.toml

[hyperstab]
# Largest hypergraph (vertex count) for the 2^|V| cut enumeration
max_vertices = 24

# Largest GHZ network (qudit count) for stabilizer simulation
max_qudits = 4096

# Largest terminal set; entropies are computed for all 2^|T| subsets
max_terminals = 8

# Largest dense state vector (amplitudes) for oracle-check
oracle_max_dimension = 1048576

# Worker processes for trials (omit to use all available cores)
# jobs = 4

# Defaults for simulate/moments/verify
prime = 2
trials = 1000
seed = 0
delta = 0.3

# Environment overrides:
#   HYPERSTAB_MAX_VERTICES, HYPERSTAB_MAX_QUDITS, HYPERSTAB_MAX_TERMINALS,
#   HYPERSTAB_ORACLE_MAX_DIMENSION, HYPERSTAB_JOBS
"""
