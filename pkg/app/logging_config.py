"""Logging configuration.

Both entry points share one ``dictConfig`` layout. The ``qsim`` command line
logs to stderr without a file, so stdout carries only reports and tables. The
JSON API logs to stdout and, where the directory is writable, to a rotating
``qsim.log``.
"""

import logging
import logging.config
import os
from pathlib import Path
from typing import Any

from app.env_config import LoggingConfig

LOG_FILE_NAME = "qsim.log"
CONTAINER_LOGS_DIR = Path("/app/logs")

# Sweeps run in worker threads, so the detailed format names the thread
_FORMATTERS: dict[str, dict[str, str]] = {
    "standard": {
        "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        "datefmt": "%Y-%m-%d %H:%M:%S",
    },
    "detailed": {
        "format": "%(asctime)s [%(levelname)s] %(name)s:%(lineno)d [%(threadName)s] "
        "%(funcName)s(): %(message)s",
        "datefmt": "%Y-%m-%d %H:%M:%S",
    },
    "json": {
        "format": '{"timestamp": "%(asctime)s", "level": "%(levelname)s", '
        '"logger": "%(name)s", "thread": "%(threadName)s", "message": "%(message)s"}',
        "datefmt": "%Y-%m-%dT%H:%M:%S",
    },
}


def _file_handler(level: str) -> dict[str, Any] | None:
    logs_dir = CONTAINER_LOGS_DIR if CONTAINER_LOGS_DIR.exists() else Path.cwd()
    try:
        if not (logs_dir.exists() and os.access(logs_dir, os.W_OK)):
            return None
    except (OSError, PermissionError):
        return None
    return {
        "class": "logging.handlers.RotatingFileHandler",
        "level": level,
        "formatter": "detailed",
        "filename": str(logs_dir / LOG_FILE_NAME),
        "maxBytes": 10485760,  # 10MB
        "backupCount": 5,
        "encoding": "utf8",
    }


def setup_logging(
    logging_config: LoggingConfig,
    stream: str = "ext://sys.stdout",
    file_logging: bool = True,
) -> None:
    """Apply the logging configuration for one entry point.

    Args:
        logging_config: Validated level and debug flag from ``env_config``.
        stream: Console stream in ``logging.config`` notation.
        file_logging: Add the rotating ``qsim.log`` handler when the logs
            directory is writable.
    """
    level = logging_config.log_level.value
    console_formatter = "detailed" if logging_config.debug_mode else "standard"
    if os.environ.get("FLASK_ENV") == "production" and os.environ.get("CONTAINER_ENV"):
        console_formatter = "json"

    handlers: dict[str, dict[str, Any]] = {
        "console": {
            "class": "logging.StreamHandler",
            "level": level,
            "formatter": console_formatter,
            "stream": stream,
        }
    }
    app_handlers = ["console"]
    file_handler = _file_handler(level) if file_logging else None
    if file_handler is not None:
        handlers["file"] = file_handler
        app_handlers.append("file")

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": _FORMATTERS,
            "handlers": handlers,
            "loggers": {
                "app": {"level": level, "handlers": app_handlers, "propagate": False},
                # Request lines are logged by the middleware already
                "werkzeug": {"level": "WARNING", "handlers": ["console"], "propagate": False},
            },
            "root": {"level": level, "handlers": ["console"]},
        }
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger under the ``app`` namespace.

    Args:
        name: Logger name, typically ``__name__`` of the calling module.

    Returns:
        logging.Logger: Logger that inherits the ``app`` handlers.

    Example:
        >>> logger = get_logger("quantum.pauli_algebra")
        >>> logger.name
        'app.quantum.pauli_algebra'
    """
    if not name.startswith("app."):
        name = f"app.{name}"
    return logging.getLogger(name)
