"""Tests for version utility module.

This module contains tests for the version lookup, including caching,
``pyproject.toml`` parsing and the installed-metadata fallback.
"""

from importlib import metadata

import pytest

from app.utils import version as version_module
from app.utils.version import get_application_version, reset_version_cache


@pytest.fixture
def pyproject(tmp_path, mocker):
    """Point the version lookup at a temporary pyproject file."""
    path = tmp_path / "pyproject.toml"
    mocker.patch.object(version_module, "PYPROJECT_PATH", path)
    return path


@pytest.mark.unit
class TestVersionUtility:
    """Test suite for version utility functions."""

    def setup_method(self):
        """Reset version cache before each test."""
        reset_version_cache()

    def teardown_method(self):
        """Do not leak a patched version into other tests."""
        reset_version_cache()

    @pytest.mark.unit
    def test_get_application_version_from_real_pyproject(self):
        """Test version extraction from actual pyproject.toml."""
        assert get_application_version() == "0.1.0"

    @pytest.mark.unit
    def test_version_caching_behavior(self, pyproject):
        """Test that version is cached after first call."""
        pyproject.write_text('[project]\nversion = "1.2.3"\n', encoding="utf-8")
        assert get_application_version() == "1.2.3"

        pyproject.write_text('[project]\nversion = "9.9.9"\n', encoding="utf-8")
        assert get_application_version() == "1.2.3"

        reset_version_cache()
        assert get_application_version() == "9.9.9"

    @pytest.mark.unit
    def test_version_parsing_with_single_quotes(self, pyproject):
        """Test version parsing with single quotes."""
        pyproject.write_text("[project]\nname = 'x'\nversion = '2.0.0'\n", encoding="utf-8")
        assert get_application_version() == "2.0.0"

    @pytest.mark.unit
    def test_pyproject_is_read_before_installed_metadata(self, pyproject, mocker):
        """Test that a usable pyproject wins and metadata is never consulted."""
        pyproject.write_text('[project]\nversion = "4.5.6"\n', encoding="utf-8")
        lookup = mocker.patch.object(metadata, "version", return_value="3.1.4")

        assert get_application_version() == "4.5.6"
        lookup.assert_not_called()

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "content",
        [None, '[project]\nname = "test-app"\n', "[project\nversion = 1"],
        ids=["missing-file", "missing-version", "malformed"],
    )
    def test_fallback_to_installed_metadata(self, pyproject, mocker, content):
        """Test that installed metadata is used when the pyproject is unusable."""
        if content is not None:
            pyproject.write_text(content, encoding="utf-8")
        lookup = mocker.patch.object(metadata, "version", return_value="3.1.4")

        assert get_application_version() == "3.1.4"
        lookup.assert_called_once_with("py-qbit-pictures")

    @pytest.mark.unit
    def test_unknown_when_no_source_exists(self, pyproject, mocker):
        """Test the final fallback value."""
        mocker.patch.object(
            metadata, "version", side_effect=metadata.PackageNotFoundError("py-qbit-pictures")
        )
        assert get_application_version() == "unknown"


@pytest.mark.integration
class TestVersionIntegration:
    """Integration tests for version functionality."""

    def setup_method(self):
        """Reset version cache before each test."""
        reset_version_cache()

    @pytest.mark.integration
    def test_version_consistent_across_calls(self):
        """Test version consistency across multiple calls."""
        versions = [get_application_version() for _ in range(5)]
        assert len(set(versions)) == 1

    @pytest.mark.integration
    def test_version_is_reported_by_health_endpoint(self, client):
        """Test that /health carries the package version."""
        assert client.get("/health").get_json()["version"] == get_application_version()
