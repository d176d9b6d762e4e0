"""Application version lookup.

The version is read from ``pyproject.toml`` next to the package, falling back
to the installed distribution metadata when no usable file is found. The
result is cached; ``--version``, ``/health`` and every report header read it.
"""

import tomllib
from importlib import metadata
from pathlib import Path

from app.logging_config import get_logger

logger = get_logger(__name__)

DISTRIBUTION_NAME = "py-qbit-pictures"
PYPROJECT_PATH = Path(__file__).resolve().parent.parent.parent / "pyproject.toml"

_cached_version: str | None = None


def get_application_version() -> str:
    """Get the application version, caching the first successful lookup.

    Returns:
        str: Version string, or ``"unknown"`` if neither source provides one.

    Example:
        >>> get_application_version()
        '0.1.0'
    """
    global _cached_version

    if _cached_version is not None:
        return _cached_version

    try:
        _cached_version = _version_from_pyproject(PYPROJECT_PATH)
    except (OSError, ValueError, tomllib.TOMLDecodeError) as e:
        logger.debug(f"No usable pyproject.toml ({e}); trying installed metadata")
        try:
            _cached_version = metadata.version(DISTRIBUTION_NAME)
        except metadata.PackageNotFoundError:
            logger.error("Application version could not be determined")
            _cached_version = "unknown"
    logger.debug(f"Application version loaded: {_cached_version}")
    return _cached_version


def _version_from_pyproject(path: Path) -> str:
    """Read ``[project].version`` from a pyproject file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the version field is missing or empty.
    """
    with open(path, "rb") as f:
        data = tomllib.load(f)
    version = data.get("project", {}).get("version")
    if not version:
        raise ValueError(f"Version field not found in {path} [project] section")
    return str(version)


def reset_version_cache() -> None:
    """Forget the cached version (used by tests)."""
    global _cached_version
    _cached_version = None
    logger.debug("Version cache reset")
