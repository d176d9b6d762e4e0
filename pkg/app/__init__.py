"""Small-register qubit simulator with three interchangeable pictures.

``create_app`` builds the Flask JSON API over the scenario registry. The
command line lives in ``app.cli``; the simulation code in ``app.quantum`` and
``app.analysis`` does not depend on Flask.
"""

# .env must be loaded before the configuration classes read os.environ
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    pass

from flask import Flask

from app.config import Config, get_scenario_config
from app.env_config import FlaskEnvironment, get_logging_config
from app.logging_config import get_logger, setup_logging
from app.main import bp as main_bp
from app.middleware import setup_request_logging
from app.scenarios import SCENARIOS, ScenarioOptions


def create_app(
    config_class: type[Config] | str | FlaskEnvironment | None = None,
) -> Flask:
    """Build the JSON scenario API.

    Args:
        config_class: Configuration class, or an environment name resolved by
            ``get_scenario_config``. FLASK_ENV decides when omitted.

    Returns:
        Flask: Application with request logging and the scenario routes.

    Raises:
        ValueError: If the environment name is invalid or the configured
            scenario defaults are out of range.

    Example:
        >>> from app import create_app
        >>> create_app("testing").test_client().get("/scenarios").status_code
        200
    """
    if not isinstance(config_class, type):
        config_class = get_scenario_config(config_class)

    app = Flask(__name__)
    app.config.from_object(config_class)
    app.config["SCENARIO_CONFIG"] = config_class

    logging_config = get_logging_config()
    setup_logging(logging_config)
    logger = get_logger(__name__)
    logger.info(f"Starting JSON API with config: {config_class.__name__}")
    logger.debug(
        f"Log level: {logging_config.log_level}, debug mode: {logging_config.debug_mode}"
    )

    # Validates SECRET_KEY in production
    config_class.init_app(app)

    # Out-of-range QSIM_* defaults fail here instead of on the first request
    defaults = ScenarioOptions.from_config(config_class).validate()
    logger.debug(f"Scenario defaults: {defaults._asdict()}")

    setup_request_logging(app)
    app.register_blueprint(main_bp)
    logger.info(f"Serving {len(SCENARIOS)} scenarios: {', '.join(SCENARIOS)}")
    return app
