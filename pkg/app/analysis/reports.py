"""Structured check reports shared by the analyses, scenarios and the CLI.

A report is a tree of named checks, each with pass/fail, a one-line detail,
the witnesses that explain a failure (the observable, factor or value that
moved) and free-form numeric data. Reports render to deterministic JSON and
to a markdown summary.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def to_jsonable(value: Any) -> Any:  # noqa: C901  # one branch per supported type
    """Convert numpy scalars, complex numbers and containers to JSON values.

    Complex numbers become ``{"re": x, "im": y}``; non-finite floats become
    strings so the output stays valid JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple | set | frozenset):
        items = sorted(value) if isinstance(value, set | frozenset) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, bool) or value is None or isinstance(value, int | str):
        return value
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    return str(value)


@dataclass
class CheckResult:
    """Outcome of one named check.

    Attributes:
        name: Short identifier, e.g. ``"heisenberg"``.
        passed: Whether the check held.
        detail: Human-readable one-line summary.
        witnesses: Counterexamples or the items that were inspected.
        metrics: Numeric evidence such as maximum discrepancies.
    """

    name: str
    passed: bool
    detail: str = ""
    witnesses: list[str] = field(default_factory=list)
    metrics: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witnesses": list(self.witnesses),
            "metrics": to_jsonable(self.metrics),
        }


@dataclass
class Report:
    """A titled collection of checks plus supporting data."""

    title: str
    checks: list[CheckResult] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def check(self, name: str) -> CheckResult:
        """Return the check called ``name``.

        Raises:
            KeyError: If no such check exists.
        """
        for candidate in self.checks:
            if candidate.name == name:
                return candidate
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "data": to_jsonable(self.data),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"# {self.title}",
            "",
            f"**Status:** {status}",
            "",
            "| Check | Result | Detail |",
            "|---|---|---|",
        ]
        for c in self.checks:
            lines.append(f"| {c.name} | {'pass' if c.passed else 'FAIL'} | {c.detail} |")
        for c in self.checks:
            if c.witnesses:
                lines += ["", f"## Witnesses: {c.name}", ""]
                lines += [f"- `{w}`" for w in c.witnesses]
        if self.data:
            lines += ["", "## Data", ""]
            for key, value in sorted(to_jsonable(self.data).items()):
                lines.append(f"- **{key}**: `{json.dumps(value, sort_keys=True)}`")
        return "\n".join(lines) + "\n"


class AuditReport(Report):
    """Report of an Einstein-locality audit (Heisenberg, product-form, Schrödinger)."""
