"""Blueprint for the JSON scenario API."""

from flask import Blueprint

bp = Blueprint("main", __name__)

from app.main import routes as routes  # noqa: E402,F401
