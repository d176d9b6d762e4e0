"""Unit tests for the JSON API routes.

This module covers the index and health endpoints, the scenario listing and
the scenario runner with its option validation.
"""

import pytest

from app.main import routes
from app.main.routes import _options_from_payload, health_check
from app.scenarios import SCENARIOS


@pytest.mark.unit
class TestHealthCheckRoute:
    """Test suite for health check route functionality."""

    @pytest.mark.unit
    def test_health_check_success(self, app, mocker):
        """Test successful health check response."""
        mocker.patch("app.main.routes.get_application_version", return_value="1.0.0")

        response, status_code = health_check()

        assert status_code == 200
        assert response.json == {
            "status": "healthy",
            "service": "py-qbit-pictures",
            "version": "1.0.0",
        }

    @pytest.mark.unit
    def test_health_check_exception_handling(self, app, mocker):
        """Test health check exception handling."""
        mocker.patch(
            "app.main.routes.get_application_version", side_effect=Exception("Version error")
        )
        error = mocker.patch.object(routes.logger, "error")

        response, status_code = health_check()

        assert status_code == 503
        assert response.json["status"] == "unhealthy"
        assert response.json["error"] == "Version error"
        error.assert_called_once_with("Health check failed: Version error")


@pytest.mark.unit
class TestOptionsPayload:
    """Test suite for JSON option parsing."""

    @pytest.mark.unit
    def test_defaults_come_from_app_config(self, app):
        """Test that an empty payload gives the TestConfig options."""
        options = _options_from_payload({})
        assert options.qubits == 3
        assert options.samples == 20_000

    @pytest.mark.unit
    def test_integral_floats_are_accepted(self, app):
        """Test that 4.0 is accepted for an integer option."""
        options = _options_from_payload({"qubits": 4.0, "phi": 1})
        assert options.qubits == 4
        assert isinstance(options.qubits, int)
        assert options.phi == 1.0

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "payload,message",
        [
            ({"colour": 1}, "Unknown options: colour"),
            ({"workers": 2}, "Unknown options: workers"),
            ({"qubits": "4"}, "must be a number"),
            ({"qubits": True}, "must be a number"),
            ({"depth": 2.5}, "must be an integer"),
            ({"seeds": float("inf")}, "must be an integer"),
            ({"qubits": 40}, "qubits must be in 1..10"),
        ],
    )
    def test_invalid_payloads(self, app, payload, message):
        """Test the error message for each kind of invalid option."""
        with pytest.raises(ValueError, match=message):
            _options_from_payload(payload)


@pytest.mark.api
class TestScenarioEndpoints:
    """Test suite for the scenario endpoints."""

    @pytest.mark.api
    def test_index(self, client):
        """Test the service description."""
        data = client.get("/").get_json()
        assert data["service"] == "py-qbit-pictures"
        assert "/scenarios/<name>" in data["endpoints"]

    @pytest.mark.api
    def test_list_scenarios(self, client):
        """Test that the listing mirrors the registry."""
        data = client.get("/scenarios").get_json()
        assert [s["name"] for s in data["scenarios"]] == list(SCENARIOS)

    @pytest.mark.api
    def test_run_scenario(self, client):
        """Test that a scenario run returns the passing report."""
        response = client.post("/scenarios/cz-entangler", json={})
        assert response.status_code == 200
        data = response.get_json()
        assert data["passed"] is True
        assert data["data"]["scenario"] == "cz-entangler"
        assert [c["name"] for c in data["checks"]][:2] == [
            "initial_generators",
            "entangled_generators",
        ]

    @pytest.mark.api
    def test_run_scenario_without_body(self, client):
        """Test that a missing body means default options."""
        response = client.post("/scenarios/data-hiding")
        assert response.status_code == 200
        assert response.get_json()["data"]["options"]["qubits"] == 3

    @pytest.mark.api
    def test_options_reach_the_scenario(self, client):
        """Test that JSON options override the defaults."""
        response = client.post("/scenarios/bell-phase-kick", json={"phi": 0.25})
        assert response.get_json()["data"]["options"]["phi"] == 0.25

    @pytest.mark.api
    def test_failed_checks_still_return_200(self, client, mocker):
        """Test that a failing report is a successful response."""
        from app.quantum.heisenberg_backend import CLIFFORD_IMAGES
        from app.quantum.schrodinger_backend import GateKind

        mocker.patch.dict(CLIFFORD_IMAGES[GateKind.CZ], {(0, "X"): ("XZ", 2)})
        response = client.post("/scenarios/cz-entangler", json={})
        assert response.status_code == 200
        assert response.get_json()["passed"] is False

    @pytest.mark.api
    def test_unknown_scenario(self, client):
        """Test 404 for an unregistered name."""
        response = client.post("/scenarios/teleportation", json={})
        assert response.status_code == 404
        assert "teleportation" in response.get_json()["error"]

    @pytest.mark.api
    @pytest.mark.parametrize("payload", [[1, 2], {"seeds": 0}, {"phi": "pi"}])
    def test_invalid_options(self, client, payload):
        """Test 400 for non-object payloads and invalid values."""
        response = client.post("/scenarios/chsh", json=payload)
        assert response.status_code == 400
        assert "error" in response.get_json()

    @pytest.mark.api
    def test_get_is_not_allowed(self, client):
        """Test that scenarios only run on POST."""
        assert client.get("/scenarios/chsh").status_code == 405
