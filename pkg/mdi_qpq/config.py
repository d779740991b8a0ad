import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from mdi_qpq.exceptions import ConfigurationError

# Load environment variables
load_dotenv(override=False)

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).parent.parent
CONFIG_FILENAME = "config.yml"
CONFIG_ENV_VAR = "MDI_QPQ_CONFIG"
OUTPUT_DIR_ENV_VAR = "MDI_QPQ_OUTPUT_DIR"

# YAML config keys
NUMERICS = "numerics"
SIMULATION = "simulation"
SCAN = "scan"
PATHS = "paths"
OUTPUT = "output"
DIR = "dir"

_DEFAULTS: Dict[str, Any] = {
    NUMERICS: {"zero_tolerance": 1.0e-12, "norm_tolerance": 1.0e-12},
    SIMULATION: {
        "rounds": 100_000,
        "chunk_size": 65_536,
        "test_fraction": 0.5,
        "threshold": 0.2,
        "transcript_round_cap": 1000,
        "guess_sessions": 1000,
    },
    SCAN: {"points": 65},
    PATHS: {OUTPUT: {DIR: "output"}},
}


# Internal classes and functions
class _YamlConfig:
    """Internal class to handle YAML configuration loading and access."""

    def __init__(self, config_path: Path) -> None:
        self.config: Dict[str, Any] = {}
        self.load(config_path)

    def load(self, config_path: Path) -> None:
        """Load and parse the YAML configuration file."""
        if not config_path.exists():
            logger.warning(f"No config file at {config_path}, using defaults")
            self.config = _DEFAULTS
            return

        try:
            with open(config_path) as f:
                loaded = yaml.safe_load(f)
        except yaml.YAMLError as e:
            logger.error(f"Error loading config file at {config_path}:\n{e}")
            raise ConfigurationError(f"Failed to load config: {e}") from e

        if not isinstance(loaded, dict):
            raise ConfigurationError(f"Config root must be a mapping: {config_path}")
        self.config = loaded

    def get_value(self, *keys: str, default: Optional[Any] = None) -> Any:
        """Safely get nested config values, falling back to built-in defaults."""
        value = self._lookup(self.config, keys)
        if value is None:
            value = self._lookup(_DEFAULTS, keys)
        return default if value is None else value

    @staticmethod
    def _lookup(tree: Dict[str, Any], keys: tuple[str, ...]) -> Any:
        value: Any = tree
        for key in keys:
            if not isinstance(value, dict):
                raise ConfigurationError(
                    f"Expected dict at key '{key}', got {type(value)}"
                )
            value = value.get(key)
            if value is None:
                return None
        return value


def _config_path() -> Path:
    override = os.getenv(CONFIG_ENV_VAR)
    return Path(override) if override else PROJECT_ROOT / CONFIG_FILENAME


# Initialize Config instance
config = _YamlConfig(_config_path())


class _Numerics:
    """Numerical tolerances shared by state arithmetic and sifting."""

    def __init__(self) -> None:
        self.zero_tolerance: float = float(
            config.get_value(NUMERICS, "zero_tolerance")
        )
        self.norm_tolerance: float = float(
            config.get_value(NUMERICS, "norm_tolerance")
        )
        self.validate()

    def validate(self) -> None:
        """Validate tolerance values."""
        for name in ("zero_tolerance", "norm_tolerance"):
            value = getattr(self, name)
            if not 0 < value < 1e-6:
                raise ConfigurationError(f"{name} must be in (0, 1e-6), got {value}")


class _Simulation:
    """Monte Carlo engine defaults."""

    def __init__(self) -> None:
        self.rounds: int = int(config.get_value(SIMULATION, "rounds"))
        self.chunk_size: int = int(config.get_value(SIMULATION, "chunk_size"))
        self.test_fraction: float = float(
            config.get_value(SIMULATION, "test_fraction")
        )
        self.threshold: float = float(config.get_value(SIMULATION, "threshold"))
        self.transcript_round_cap: int = int(
            config.get_value(SIMULATION, "transcript_round_cap")
        )
        self.guess_sessions: int = int(config.get_value(SIMULATION, "guess_sessions"))
        self.validate()

    def validate(self) -> None:
        """Validate simulation defaults."""
        if self.rounds < 1:
            raise ConfigurationError(f"rounds must be positive, got {self.rounds}")
        if self.chunk_size < 1:
            raise ConfigurationError(
                f"chunk_size must be positive, got {self.chunk_size}"
            )
        if not 0 < self.test_fraction <= 1:
            raise ConfigurationError(
                f"test_fraction must be in (0, 1], got {self.test_fraction}"
            )
        if not 0 <= self.threshold <= 1:
            raise ConfigurationError(
                f"threshold must be in [0, 1], got {self.threshold}"
            )
        if self.transcript_round_cap < 0:
            raise ConfigurationError("transcript_round_cap cannot be negative")
        if self.guess_sessions < 1:
            raise ConfigurationError("guess_sessions must be positive")


class _Scan:
    """Parameter grid defaults."""

    def __init__(self) -> None:
        self.points: int = int(config.get_value(SCAN, "points"))
        if self.points < 1:
            raise ConfigurationError(f"scan points must be positive, got {self.points}")


class _Paths:
    """Output directory configuration."""

    def __init__(self) -> None:
        override = os.getenv(OUTPUT_DIR_ENV_VAR)
        configured = override or config.get_value(PATHS, OUTPUT, DIR)
        if not isinstance(configured, (str, Path)):
            raise ConfigurationError(
                f"Expected string or Path for output dir, got {type(configured)}"
            )
        self.output_dir = Path(configured)

    def resolve_output(self, path: Path) -> Path:
        """Resolve a relative output path against the output directory."""
        if path.is_absolute():
            return path
        base = self.output_dir
        if not base.is_absolute():
            base = Path.cwd() / base
        return base / path


# Configuration instances for external use
numerics_config = _Numerics()
simulation_config = _Simulation()
scan_config = _Scan()
paths = _Paths()
