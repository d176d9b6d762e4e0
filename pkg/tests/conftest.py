"""Test configuration and fixtures module.

This module provides pytest fixtures shared by the whole suite: the Flask
application and its clients, a click runner for the ``qsim`` command line,
the reduced scenario options of ``TestConfig`` and a seeded random generator.
"""

import numpy as np
import pytest
from click.testing import CliRunner

from app import create_app
from app.config import TestConfig
from app.scenarios import ScenarioOptions


@pytest.fixture
def app():
    """Create and configure a new Flask app instance for each test.

    Creates a Flask application instance using TestConfig for isolated
    testing with proper test configuration settings.

    Yields:
        Flask: Configured Flask application instance for testing.
    """
    app = create_app(TestConfig)

    with app.app_context():
        yield app


@pytest.fixture
def client(app):
    """Create a test client for the Flask app.

    Args:
        app: Flask application fixture.

    Returns:
        FlaskClient: Test client for making HTTP requests.
    """
    return app.test_client()


@pytest.fixture
def cli_runner():
    """Click runner for the ``qsim`` console script."""
    return CliRunner()


@pytest.fixture
def scenario_options():
    """Scenario options with the reduced sweep sizes of TestConfig.

    Returns:
        ScenarioOptions: Validated options for fast scenario runs.
    """
    return ScenarioOptions.from_config(TestConfig).validate()


@pytest.fixture
def rng():
    """Random generator seeded with the test master seed."""
    return np.random.default_rng(TestConfig.DEFAULT_SEED)
