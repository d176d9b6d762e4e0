"""JSON API routes.

The API exposes the scenario registry: list the scenarios, run one with JSON
options and receive the same report the command line writes to disk.
"""

import math

from flask import current_app, jsonify, request

from app.exceptions import UnknownScenarioError
from app.logging_config import get_logger
from app.main import bp
from app.scenarios import SCENARIOS, ScenarioOptions, run_scenario
from app.utils.version import get_application_version

logger = get_logger(__name__)

SERVICE_NAME = "py-qbit-pictures"


@bp.route("/")
def index():
    """Describe the service and its endpoints.

    Returns:
        Response: JSON with the service name, version and endpoint list.
    """
    logger.info("Index requested")
    return jsonify(
        {
            "service": SERVICE_NAME,
            "version": get_application_version(),
            "endpoints": ["/health", "/scenarios", "/scenarios/<name>"],
        }
    )


@bp.route("/health")
def health_check():
    """Health check endpoint for load balancers and monitoring.

    Returns:
        tuple: JSON response with status and HTTP status code.
    """
    try:
        version = get_application_version()
        return (
            jsonify({"status": "healthy", "service": SERVICE_NAME, "version": version}),
            200,
        )
    except Exception as e:
        logger.error(f"Health check failed: {e}")
        return jsonify({"status": "unhealthy", "error": str(e)}), 503


@bp.route("/scenarios")
def list_scenarios():
    """List registered scenarios with their descriptions."""
    return jsonify(
        {
            "scenarios": [
                {"name": s.name, "description": s.description} for s in SCENARIOS.values()
            ]
        }
    )


def _options_from_payload(payload: dict) -> ScenarioOptions:
    """Merge JSON options over the app's configured defaults.

    Raises:
        ValueError: For unknown keys or values of the wrong type.
    """
    casts = {
        "phi": float,
        "qubits": int,
        "depth": int,
        "seeds": int,
        "samples": int,
        "seed": int,
        "chsh_settings": int,
    }
    unknown = sorted(set(payload) - set(casts))
    if unknown:
        raise ValueError(f"Unknown options: {', '.join(unknown)}")
    overrides = {}
    for key, value in payload.items():
        if isinstance(value, bool) or not isinstance(value, int | float):
            raise ValueError(f"Option {key!r} must be a number")
        if casts[key] is int and not (math.isfinite(value) and value == int(value)):
            raise ValueError(f"Option {key!r} must be an integer")
        overrides[key] = casts[key](value)
    config_class = current_app.config["SCENARIO_CONFIG"]
    return ScenarioOptions.from_config(config_class, **overrides).validate()


@bp.route("/scenarios/<name>", methods=["POST"])
def run_named_scenario(name: str):
    """Run a scenario and return its report.

    Expected JSON payload (every key optional):
        {"phi": 3.14159, "qubits": 4, "depth": 20, "seeds": 100,
         "samples": 100000, "seed": 20240601, "chsh_settings": 10000}

    Returns:
        tuple: The report as JSON with status 200 whether or not its checks
        passed; 404 for an unknown scenario; 400 for invalid options.
    """
    logger.info(f"Scenario request received: {name}")
    payload = request.get_json(silent=True)
    if payload is None:
        payload = {}
    if not isinstance(payload, dict):
        return jsonify({"error": "Options must be a JSON object"}), 400

    if name not in SCENARIOS:
        logger.warning(f"Unknown scenario requested: {name}")
        return jsonify({"error": str(UnknownScenarioError(f"Unknown scenario {name!r}"))}), 404

    try:
        options = _options_from_payload(payload)
    except ValueError as e:
        logger.warning(f"Invalid options for {name}: {e}")
        return jsonify({"error": str(e)}), 400

    report = run_scenario(name, options)
    return jsonify(report.to_dict()), 200
