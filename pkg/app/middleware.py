"""Request logging and error mapping middleware for the JSON API."""

import time

from flask import g, jsonify, request

from app.exceptions import SimulatorError, UnknownObservableError, UnknownScenarioError
from app.logging_config import get_logger

logger = get_logger(__name__)


def _client_ip() -> str | None:
    """Client address, honouring the first X-Forwarded-For hop."""
    client_ip = request.headers.get("X-Forwarded-For", request.remote_addr)
    if client_ip:
        client_ip = client_ip.split(",")[0].strip()
    return client_ip


def setup_request_logging(app):
    """Set up request logging and JSON error handlers.

    Args:
        app: Flask application instance to configure.
    """

    @app.before_request
    def log_request_start():
        """Log the start of each request and remember when it began."""
        g.start_time = time.perf_counter()
        logger.info(f"Request started: {request.method} {request.path}")
        logger.debug(f"Client IP: {_client_ip()}")
        if request.args:
            logger.debug(f"Query params: {dict(request.args)}")
        if app.debug and request.is_json:
            logger.debug(f"Request body: {request.get_data(as_text=True)[:500]}")

    @app.after_request
    def log_request_end(response):
        """Log status and duration; level follows the status class.

        Args:
            response: Flask response object.

        Returns:
            Flask response object (unchanged).
        """
        duration = time.perf_counter() - g.get("start_time", time.perf_counter())
        if response.status_code < 400:
            log_level = logger.info
        elif response.status_code < 500:
            log_level = logger.warning
        else:
            log_level = logger.error
        log_level(
            f"Request completed: {request.method} {request.path} - "
            f"Status: {response.status_code} - "
            f"Duration: {duration:.3f}s - "
            f"IP: {_client_ip()}"
        )
        return response

    @app.errorhandler(SimulatorError)
    def handle_simulator_error(error):
        """Map simulator errors to JSON: unknown names 404, bad input 400."""
        unknown = isinstance(error, UnknownScenarioError | UnknownObservableError)
        status = 404 if unknown else 400
        logger.warning(f"{type(error).__name__} on {request.path}: {error}")
        return jsonify({"error": str(error), "type": type(error).__name__}), status

    @app.errorhandler(404)
    def log_not_found(error):
        """Log 404 Not Found errors and answer with JSON."""
        logger.warning(f"404 Not Found: {request.method} {request.path} - IP: {_client_ip()}")
        return {"error": "Not found"}, 404

    @app.errorhandler(500)
    def log_server_error(error):
        """Log 500 Internal Server errors and answer with JSON."""
        logger.error(
            f"500 Server Error: {request.method} {request.path} - "
            f"IP: {_client_ip()} - "
            f"Error: {str(error)}"
        )
        return {"error": "Internal server error"}, 500

    logger.info("Request logging middleware initialized")
