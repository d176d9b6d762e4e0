"""Centralized environment variable configuration module.

This module is the single source of truth for the environment variables read
by every entry point (the ``qsim`` command line, the JSON API and
``app/__init__.py``): LOG_LEVEL, FLASK_ENV, PORT and the ``QSIM_*`` simulation
defaults.
"""

import logging
import os
from enum import Enum
from typing import NamedTuple


class LogLevel(Enum):
    """Enumeration of standard logging levels.

    Attributes:
        DEBUG: Debug level logging
        INFO: Informational level logging
        WARNING: Warning level logging
        ERROR: Error level logging
        CRITICAL: Critical level logging
    """

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class FlaskEnvironment(Enum):
    """Enum for the runtime environment.

    Values:
        DEVELOPMENT: Development environment with debugging enabled
        TESTING: Testing environment with reduced sweep sizes
        PRODUCTION: Production environment with security hardening
    """

    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"

    @classmethod
    def from_string(cls, value: str) -> "FlaskEnvironment":
        """Convert string environment value to FlaskEnvironment enum.

        Args:
            value: String environment value (case-insensitive)

        Returns:
            FlaskEnvironment: Corresponding enum value

        Raises:
            ValueError: If the environment value is not valid

        Examples:
            >>> FlaskEnvironment.from_string("PRODUCTION")
            FlaskEnvironment.PRODUCTION
        """
        valid = ", ".join(e.value for e in cls)
        try:
            normalized_value = value.lower()
        except (AttributeError, TypeError) as err:
            raise ValueError(
                f"Invalid Flask environment: '{value}'. Valid values are: {valid}"
            ) from err
        for env in cls:
            if env.value == normalized_value:
                return env
        raise ValueError(f"Invalid Flask environment: '{value}'. Valid values are: {valid}")


class LoggingConfig(NamedTuple):
    """Configuration tuple for logging settings.

    Attributes:
        log_level: Validated log level from LogLevel enum
        debug_mode: Boolean flag indicating if debug mode should be enabled
    """

    log_level: LogLevel
    debug_mode: bool


class SimulationDefaults(NamedTuple):
    """Default scenario parameters taken from ``QSIM_*`` variables.

    Attributes:
        seed: Master RNG seed (QSIM_SEED).
        qubits: Register size for random-circuit sweeps (QSIM_QUBITS).
        depth: Gates per random circuit (QSIM_DEPTH).
        seeds: Number of random circuits per sweep (QSIM_SEEDS).
        samples: Classical ensemble size (QSIM_SAMPLES).
        out_dir: Directory reports are written to (QSIM_OUT_DIR).
        workers: Thread count for sweeps (QSIM_WORKERS).
    """

    seed: int = 20240601
    qubits: int = 4
    depth: int = 20
    seeds: int = 100
    samples: int = 100_000
    out_dir: str = "reports"
    workers: int = 1


def get_logging_config(level: str | None = None) -> LoggingConfig:
    """Get centralized logging configuration.

    Logic:
    1. Use ``level`` when given, otherwise the LOG_LEVEL environment variable
    2. Validate it against LogLevel enum values (case-insensitive)
    3. If it is "DEBUG", enable debug mode
    4. If it is invalid/missing, fall back to INFO level

    Args:
        level: Explicit override, e.g. from the ``--log-level`` option.

    Returns:
        LoggingConfig: Named tuple with validated LogLevel enum and debug_mode

    Examples:
        >>> # With LOG_LEVEL=debug
        >>> get_logging_config().log_level
        <LogLevel.DEBUG: 'DEBUG'>
    """
    raw = level if level is not None else os.environ.get("LOG_LEVEL", "info")
    try:
        log_level = LogLevel(raw.upper())
    except ValueError:
        log_level = LogLevel.INFO

    return LoggingConfig(log_level=log_level, debug_mode=log_level == LogLevel.DEBUG)


def get_flask_env() -> FlaskEnvironment:
    """Get the runtime environment from FLASK_ENV (default development).

    Raises:
        ValueError: If FLASK_ENV contains an invalid environment value
    """
    env_value = os.environ.get("FLASK_ENV", "development")
    return FlaskEnvironment.from_string(env_value)


def get_port() -> int:
    """Get port number from environment.

    Returns:
        int: Port number from PORT environment variable, defaults to 5000
    """
    return int(os.environ.get("PORT", 5000))


def _int_env(name: str, default: int, minimum: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        value = minimum - 1
    if value < minimum:
        # logging_config imports this module, so use the stdlib logger here
        logging.getLogger("app.env_config").warning(
            f"Ignoring invalid {name}={raw!r}; using {default}"
        )
        return default
    return value


def get_simulation_defaults() -> SimulationDefaults:
    """Read the ``QSIM_*`` variables, falling back per field on invalid input.

    Returns:
        SimulationDefaults: Validated defaults for the scenario runner
    """
    base = SimulationDefaults()
    return SimulationDefaults(
        seed=_int_env("QSIM_SEED", base.seed, 0),
        qubits=_int_env("QSIM_QUBITS", base.qubits, 1),
        depth=_int_env("QSIM_DEPTH", base.depth, 0),
        seeds=_int_env("QSIM_SEEDS", base.seeds, 1),
        samples=_int_env("QSIM_SAMPLES", base.samples, 2),
        out_dir=os.environ.get("QSIM_OUT_DIR") or base.out_dir,
        workers=_int_env("QSIM_WORKERS", base.workers, 1),
    )
