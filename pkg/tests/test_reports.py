"""Unit tests for check reports and their JSON and markdown renderings."""

import json
import math

import numpy as np
import pytest

from app.analysis.reports import AuditReport, CheckResult, Report, to_jsonable


@pytest.mark.unit
class TestToJsonable:
    """Test suite for JSON conversion."""

    @pytest.mark.unit
    def test_complex_numbers(self):
        """Test that complex values become re/im objects."""
        assert to_jsonable(1 - 2j) == {"re": 1.0, "im": -2.0}

    @pytest.mark.unit
    def test_numpy_values(self):
        """Test numpy scalars and arrays."""
        assert to_jsonable(np.float64(0.5)) == 0.5
        assert to_jsonable(np.bool_(True)) is True
        assert to_jsonable(np.array([[1, 2], [3, 4]])) == [[1, 2], [3, 4]]

    @pytest.mark.unit
    def test_non_finite_floats_become_strings(self):
        """Test that NaN and infinity keep the output valid JSON."""
        assert to_jsonable(math.inf) == "inf"
        assert to_jsonable(float("nan")) == "nan"

    @pytest.mark.unit
    def test_sets_are_sorted(self):
        """Test deterministic output for sets."""
        assert to_jsonable({3, 1, 2}) == [1, 2, 3]
        assert to_jsonable({"k": (1, 2)}) == {"k": [1, 2]}


@pytest.mark.unit
class TestReport:
    """Test suite for the report container."""

    @pytest.mark.unit
    def test_passed_requires_checks(self):
        """Test that an empty report does not pass."""
        report = Report("empty")
        assert not report.passed
        report.add(CheckResult("one", True))
        assert report.passed
        report.add(CheckResult("two", False))
        assert not report.passed

    @pytest.mark.unit
    def test_check_lookup(self):
        """Test lookup by name."""
        report = Report("r", [CheckResult("a", True, "detail")])
        assert report.check("a").detail == "detail"
        with pytest.raises(KeyError):
            report.check("missing")

    @pytest.mark.unit
    def test_json_is_deterministic(self):
        """Test sorted keys, indentation and the trailing newline."""
        report = Report("r", data={"b": 1, "a": 0.5j})
        report.add(CheckResult("c", True, metrics={"gap": np.float64(1e-13)}))
        text = report.to_json()
        assert text.endswith("}\n")
        assert text == report.to_json()
        parsed = json.loads(text)
        assert parsed["data"]["a"] == {"re": 0.0, "im": 0.5}
        assert parsed["checks"][0]["metrics"]["gap"] == 1e-13
        assert list(parsed) == ["checks", "data", "passed", "title"]

    @pytest.mark.unit
    def test_markdown_layout(self):
        """Test the status line, table and witness sections."""
        report = Report("Demo")
        report.add(CheckResult("ok", True, "fine"))
        report.add(CheckResult("bad", False, "broken", witnesses=["XZ -> -XZ"]))
        report.data["seed"] = 7
        text = report.to_markdown()
        assert text.startswith("# Demo\n\n**Status:** FAIL\n")
        assert "| ok | pass | fine |" in text
        assert "| bad | FAIL | broken |" in text
        assert "## Witnesses: bad" in text
        assert "- `XZ -> -XZ`" in text
        assert "- **seed**: `7`" in text

    @pytest.mark.unit
    def test_audit_report_is_a_report(self):
        """Test that audit reports share the report interface."""
        audit = AuditReport("audit", [CheckResult("heisenberg", True)])
        assert isinstance(audit, Report)
        assert audit.to_dict()["passed"] is True
