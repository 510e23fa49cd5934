"""
Application configuration
Reads config.ini from the project root with per-key fallbacks and applies
environment overrides loaded through python-dotenv
"""

import configparser
import os
from pathlib import Path
from typing import Any, Dict, List

from dotenv import load_dotenv

from model.exceptions import ValidationError

PROJECT_ROOT = Path(__file__).parent.parent.parent
CONFIG_PATH = PROJECT_ROOT / "config.ini"

DEFAULT_LAMBDAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]

load_dotenv(PROJECT_ROOT / ".env")


def read_config(config_path: Path = CONFIG_PATH) -> configparser.ConfigParser:
    """
    Read the application INI file

    Args:
        config_path (Path): Location of config.ini

    Returns:
        configparser.ConfigParser: Parsed configuration (empty if the file is missing)
    """
    config = configparser.ConfigParser()
    config.read(config_path, encoding="utf-8")
    return config


def parse_float_list(text: str) -> List[float]:
    return [float(item) for item in text.replace(";", ",").split(",") if item.strip()]


def load_integrator_defaults(config_path: Path = CONFIG_PATH) -> Dict[str, float]:
    config = read_config(config_path)
    return {
        "step": config.getfloat("INTEGRATOR", "step", fallback=1e-3),
        "event_tolerance": config.getfloat("INTEGRATOR", "event_tolerance", fallback=1e-10),
        "max_time": config.getfloat("INTEGRATOR", "max_time", fallback=1e4),
    }


def load_comparison_settings(config_path: Path = CONFIG_PATH) -> Dict[str, Any]:
    config = read_config(config_path)
    return {
        "grid_points": config.getint("COMPARISON", "grid_points", fallback=201),
        "dominance_tolerance": config.getfloat("ORACLE", "dominance_tolerance", fallback=1e-6),
    }


def load_oracle_settings(config_path: Path = CONFIG_PATH) -> Dict[str, Any]:
    """
    Oracle settings; ORACLE_WORKERS in the environment overrides [ORACLE] workers
    """
    config = read_config(config_path)
    lambdas_text = config.get("ORACLE", "lambdas", fallback="")
    workers = config.getint("ORACLE", "workers", fallback=1)
    override = os.getenv("ORACLE_WORKERS", "").strip()
    if override:
        try:
            workers = int(override)
        except ValueError as e:
            raise ValidationError(f"ORACLE_WORKERS must be an integer, got {override!r}",
                                  field="ORACLE_WORKERS") from e
    return {
        "sample_points": config.getint("ORACLE", "sample_points", fallback=50),
        "dominance_tolerance": config.getfloat("ORACLE", "dominance_tolerance", fallback=1e-6),
        "scalarization_tolerance": config.getfloat("ORACLE", "scalarization_tolerance", fallback=1e-12),
        "lambdas": parse_float_list(lambdas_text) if lambdas_text.strip() else list(DEFAULT_LAMBDAS),
        "workers": max(1, workers),
    }


def load_logging_settings(config_path: Path = CONFIG_PATH) -> Dict[str, str]:
    """
    Logging settings; LOG_LEVEL in the environment overrides [LOGGING] log_level
    """
    config = read_config(config_path)
    return {
        "log_level": os.getenv("LOG_LEVEL") or config.get("LOGGING", "log_level", fallback="INFO"),
        "log_format": config.get(
            "LOGGING", "log_format",
            fallback="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            raw=True,
        ),
        "logs_directory": config.get("FOLDERS", "logs_directory", fallback="./logs"),
    }


def resolve_directory(relative: str) -> Path:
    """Resolve a configured folder against the project root"""
    path = Path(relative)
    return path if path.is_absolute() else PROJECT_ROOT / path


def output_directory(config_path: Path = CONFIG_PATH) -> Path:
    config = read_config(config_path)
    return resolve_directory(config.get("FOLDERS", "output_directory", fallback="./output"))
