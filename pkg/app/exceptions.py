"""Exception hierarchy for the simulator.

Input validation errors derive from ``ValueError`` so callers that only care
about "bad input" can keep catching the builtin, while the CLI and the JSON
API can still distinguish usage problems from internal failures.
"""


class SimulatorError(Exception):
    """Base class for every error raised by the simulator package."""


class QubitCountMismatchError(SimulatorError, ValueError):
    """Raised when two operands act on different numbers of qubits."""


class SupportError(SimulatorError, ValueError):
    """Raised when a gate or subsystem references qubits out of range."""


class DenseCapError(SimulatorError, ValueError):
    """Raised when a dense oracle is requested above the qubit cap."""


class DimensionMismatchError(SimulatorError, ValueError):
    """Raised when a state and an operator have incompatible dimensions."""


class InvalidGeneratorsError(SimulatorError, ValueError):
    """Raised for non-commuting, dependent or malformed stabilizer generators."""


class NonHermitianError(SimulatorError, ValueError):
    """Raised when a Hermitian operator is required but not supplied."""


class PhysicalParameterError(SimulatorError, ValueError):
    """Raised for nonpositive masses, negative times and similar inputs."""


class ParseError(SimulatorError, ValueError):
    """Raised when a textual circuit, observable or state cannot be parsed.

    Attributes:
        line_number: 1-based line number of the offending line, if known.
        line: The offending line text, if known.
    """

    def __init__(
        self, message: str, line_number: int | None = None, line: str | None = None
    ) -> None:
        self.line_number = line_number
        self.line = line
        if line_number is not None:
            message = f"line {line_number}: {message}"
            if line is not None:
                message = f"{message} ({line.strip()!r})"
        super().__init__(message)


class UnknownObservableError(SimulatorError, KeyError):
    """Raised when a frame is queried for an observable it does not hold."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown observable"


class UnknownScenarioError(SimulatorError, KeyError):
    """Raised when a scenario name is not registered."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown scenario"
