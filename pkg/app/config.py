"""Application configuration module.

Configuration classes for the development, testing and production
environments. Each class carries the Flask settings of the JSON API together
with the default parameters of the scenario runner, so the command line and
the web surface resolve the same defaults.
"""

import math
import os

from app.env_config import FlaskEnvironment, get_flask_env, get_simulation_defaults

_defaults = get_simulation_defaults()


class Config:
    """Base configuration class with common settings.

    Attributes:
        SECRET_KEY: Secret key for Flask sessions.
        DEBUG: Debug mode flag, defaults to False for security.
        TESTING: Testing mode flag, defaults to False.
        DEFAULT_SEED: Master seed for every random draw.
        DEFAULT_QUBITS: Register size of the picture-equivalence sweep.
        DEFAULT_DEPTH: Gates per random circuit.
        DEFAULT_SEEDS: Random circuits per sweep.
        DEFAULT_SAMPLES: Classical ensemble size.
        DEFAULT_PHI: Phase-kick angle in radians.
        CHSH_SETTINGS: Random setting quadruples in the CHSH sweep.
        OUT_DIR: Directory report files are written to.
        SWEEP_WORKERS: Threads used by parallel sweeps.
    """

    SECRET_KEY = os.environ.get("SECRET_KEY") or "dev-secret-key-change-in-production"

    # Flask settings
    DEBUG = os.environ.get("FLASK_DEBUG", "False").lower() in ["true", "1", "yes"]
    TESTING = False

    # Scenario settings
    DEFAULT_SEED = _defaults.seed
    DEFAULT_QUBITS = _defaults.qubits
    DEFAULT_DEPTH = _defaults.depth
    DEFAULT_SEEDS = _defaults.seeds
    DEFAULT_SAMPLES = _defaults.samples
    DEFAULT_PHI = math.pi
    CHSH_SETTINGS = 10_000
    OUT_DIR = _defaults.out_dir
    SWEEP_WORKERS = _defaults.workers

    @classmethod
    def init_app(cls, app):
        """Initialize application with this configuration.

        Args:
            app: Flask application instance to configure.
        """
        pass


class DevelopmentConfig(Config):
    """Development environment configuration with debugging enabled."""

    DEBUG = True


class TestConfig(Config):
    """Testing environment configuration.

    Sweeps are shrunk so the full suite stays fast; seeds stay fixed.
    """

    TESTING = True
    SECRET_KEY = "test-secret-key"  # noqa: S105  # Test configuration only
    DEFAULT_SEED = 20240601
    DEFAULT_QUBITS = 3
    DEFAULT_DEPTH = 8
    DEFAULT_SEEDS = 5
    DEFAULT_SAMPLES = 20_000
    CHSH_SETTINGS = 2_000
    SWEEP_WORKERS = 1


class ProductionConfig(Config):
    """Production environment configuration with environment validation."""

    DEBUG = False

    @classmethod
    def init_app(cls, app):
        """Initialize production application and validate required settings.

        Args:
            app: Flask application instance to configure.

        Raises:
            ValueError: If SECRET_KEY is not set in production environment.
        """
        Config.init_app(app)

        from app.logging_config import get_logger

        logger = get_logger("config")

        if not os.environ.get("SECRET_KEY"):
            logger.critical("No SECRET_KEY set for production environment")
            raise ValueError("No SECRET_KEY set for production environment")

        app.config["SECRET_KEY"] = os.environ.get("SECRET_KEY")
        logger.info("Production configuration initialized successfully")


config: dict[str | FlaskEnvironment, type[Config]] = {
    "development": DevelopmentConfig,
    "testing": TestConfig,
    "production": ProductionConfig,
    FlaskEnvironment.DEVELOPMENT: DevelopmentConfig,
    FlaskEnvironment.TESTING: TestConfig,
    FlaskEnvironment.PRODUCTION: ProductionConfig,
}


def get_scenario_config(env: str | FlaskEnvironment | None = None) -> type[Config]:
    """Configuration class whose defaults the scenario runner uses.

    Args:
        env: Environment name or enum; FLASK_ENV when omitted.

    Raises:
        ValueError: If the environment name is not valid.
    """
    if env is None:
        env = get_flask_env()
    elif isinstance(env, str):
        env = FlaskEnvironment.from_string(env)
    return config[env]
