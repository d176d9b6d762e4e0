"""State-vector backend: states move, observables stay fixed.

This module also owns the dynamics record shared by every backend: the
``GateOp`` value, the ``Circuit`` container and the line-oriented circuit
text format::

    # comments and blank lines are ignored
    QUBITS 2
    H 0
    CZ 0 1
    PHASE 0 3.141592653589793

Amplitude index ``b`` has qubit 0 as its most significant bit.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from app.exceptions import (
    DenseCapError,
    DimensionMismatchError,
    ParseError,
    QubitCountMismatchError,
    SupportError,
)
from app.logging_config import get_logger
from app.quantum.pauli_algebra import (
    DENSE_QUBIT_CAP,
    PHASES,
    PauliString,
    PauliSum,
)

logger = get_logger(__name__)

NORM_TOLERANCE = 1e-10
OVERLAP_TOLERANCE = 1e-10


class GateKind(Enum):
    """Supported gate kinds and their arity."""

    H = "H"
    S = "S"
    X = "X"
    Y = "Y"
    Z = "Z"
    PHASE = "PHASE"
    CZ = "CZ"
    CX = "CX"

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.CZ, GateKind.CX) else 1

    @property
    def is_clifford(self) -> bool:
        return self is not GateKind.PHASE

    @classmethod
    def from_string(cls, value: str) -> "GateKind":
        """Case-insensitive lookup; ``CNOT`` is accepted for ``CX``.

        Raises:
            ValueError: If the name is not a supported gate.
        """
        normalized = value.strip().upper()
        if normalized == "CNOT":
            normalized = "CX"
        try:
            return cls(normalized)
        except ValueError as err:
            raise ValueError(
                f"Unknown gate '{value}'. Valid gates are: {', '.join(k.value for k in cls)}"
            ) from err


_SQRT2_INV = 1 / math.sqrt(2)
_FIXED_MATRICES: dict[GateKind, np.ndarray] = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.CX: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}


@dataclass(frozen=True, slots=True)
class GateOp:
    """A named unitary with explicit qubit support.

    Attributes:
        kind: Gate kind.
        support: Ordered qubit indices (control first for CX).
        phi: Phase in radians, PHASE only; ``diag(1, e^{i phi})``.
    """

    kind: GateKind
    support: tuple[int, ...]
    phi: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        if len(self.support) != self.kind.arity:
            raise SupportError(
                f"{self.kind.value} acts on {self.kind.arity} qubit(s), got {self.support}"
            )
        if len(set(self.support)) != len(self.support):
            raise SupportError(f"Repeated qubit in support {self.support}")
        if any(q < 0 for q in self.support):
            raise SupportError(f"Negative qubit index in {self.support}")
        if self.kind is GateKind.PHASE:
            if self.phi is None or not math.isfinite(self.phi):
                raise ValueError("PHASE requires a finite angle")
            object.__setattr__(self, "phi", float(self.phi))
        elif self.phi is not None:
            raise ValueError(f"{self.kind.value} takes no angle")

    @classmethod
    def h(cls, q: int) -> "GateOp":
        return cls(GateKind.H, (q,))

    @classmethod
    def s(cls, q: int) -> "GateOp":
        return cls(GateKind.S, (q,))

    @classmethod
    def x(cls, q: int) -> "GateOp":
        return cls(GateKind.X, (q,))

    @classmethod
    def y(cls, q: int) -> "GateOp":
        return cls(GateKind.Y, (q,))

    @classmethod
    def z(cls, q: int) -> "GateOp":
        return cls(GateKind.Z, (q,))

    @classmethod
    def phase(cls, q: int, phi: float) -> "GateOp":
        return cls(GateKind.PHASE, (q,), phi)

    @classmethod
    def cz(cls, a: int, b: int) -> "GateOp":
        return cls(GateKind.CZ, (a, b))

    @classmethod
    def cx(cls, control: int, target: int) -> "GateOp":
        return cls(GateKind.CX, (control, target))

    def fits(self, n: int) -> bool:
        return all(q < n for q in self.support)

    def check_fits(self, n: int) -> None:
        """Raise ``SupportError`` unless every support index is below ``n``."""
        if not self.fits(n):
            raise SupportError(f"Gate {self} does not fit {n} qubit(s)")

    def matrix(self) -> np.ndarray:
        """Dense unitary on the gate's own support (``2^k x 2^k``)."""
        if self.kind is GateKind.PHASE:
            return np.diag([1.0, np.exp(1j * self.phi)]).astype(complex)
        return _FIXED_MATRICES[self.kind]

    def inverse(self) -> "GateOp":
        """The adjoint gate, expressed within the same gate set."""
        if self.kind is GateKind.PHASE:
            return GateOp.phase(self.support[0], -self.phi)
        if self.kind is GateKind.S:
            return GateOp.phase(self.support[0], -math.pi / 2)
        return self

    def __str__(self) -> str:
        qubits = " ".join(str(q) for q in self.support)
        if self.kind is GateKind.PHASE:
            return f"PHASE {qubits} {self.phi!r}"
        return f"{self.kind.value} {qubits}"

    @classmethod
    def from_string(cls, text: str) -> "GateOp":
        """Parse one gate line such as ``"CZ 0 1"`` or ``"PHASE 0 3.14"``.

        Raises:
            ParseError: If the line is malformed.
        """
        tokens = text.split()
        if not tokens:
            raise ParseError("Empty gate line")
        try:
            kind = GateKind.from_string(tokens[0])
            arguments = tokens[1:]
            if kind is GateKind.PHASE:
                if len(arguments) != 2:
                    raise ParseError("PHASE expects: PHASE <qubit> <radians>")
                return cls(kind, (int(arguments[0]),), float(arguments[1]))
            if len(arguments) != kind.arity:
                raise ParseError(
                    f"{kind.value} expects {kind.arity} qubit index(es), got {len(arguments)}"
                )
            return cls(kind, tuple(int(a) for a in arguments))
        except ParseError:
            raise
        except ValueError as err:
            raise ParseError(str(err)) from err


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``n`` qubits; gates apply left to right."""

    n: int
    gates: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise QubitCountMismatchError(f"Circuit needs at least one qubit, got {self.n}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            gate.check_fits(self.n)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def then(self, *gates: GateOp) -> "Circuit":
        """Return a new circuit with ``gates`` appended."""
        return Circuit(self.n, self.gates + tuple(gates))

    def inverse(self) -> "Circuit":
        return Circuit(self.n, tuple(g.inverse() for g in reversed(self.gates)))

    def to_text(self) -> str:
        lines = [f"QUBITS {self.n}"] + [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> "Circuit":
        """Parse the line-oriented circuit format.

        The qubit count comes from a ``QUBITS n`` header, the ``n`` argument,
        or failing both from the largest referenced index.

        Raises:
            ParseError: Naming the first malformed line.
        """
        gates: list[GateOp] = []
        sources: list[tuple[int, str]] = []
        declared: int | None = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0].upper() == "QUBITS":
                if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                    raise ParseError("QUBITS expects a positive integer", number, raw)
                declared = int(tokens[1])
                continue
            try:
                gates.append(GateOp.from_string(line))
            except ParseError as err:
                raise ParseError(str(err), number, raw) from err
            sources.append((number, raw))
        if declared is not None and n is not None and declared != n:
            raise ParseError(f"Header declares {declared} qubits, expected {n}")
        size = declared or n
        if size is None:
            size = max((max(g.support) for g in gates), default=0) + 1
        for gate, (number, raw) in zip(gates, sources, strict=True):
            if not gate.fits(size):
                raise ParseError(f"Gate '{gate}' does not fit {size} qubit(s)", number, raw)
        return cls(size, tuple(gates))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n`` qubits as ``2^n`` amplitudes (read-only array)."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.shape[0] != 2**self.n:
            raise DimensionMismatchError(
                f"{amplitudes.shape[0]} amplitudes do not describe {self.n} qubit(s)"
            )
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"State is not normalized (squared norm {norm})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return 2**self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "StateVector") -> complex:
        _check_same_dim(self.n, other.n)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equivalent(self, other: "StateVector", tol: float = OVERLAP_TOLERANCE) -> bool:
        return equal_up_to_global_phase(self, other, tol)


def _check_same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"Dimension mismatch: {a} vs {b} qubits")


def basis_state(n: int, index: int = 0) -> StateVector:
    """Computational basis state ``|index>``."""
    amplitudes = np.zeros(2**n, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(n, amplitudes)


_LABEL_STATES: dict[str, np.ndarray] = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) * _SQRT2_INV,
    "-": np.array([1, -1], dtype=complex) * _SQRT2_INV,
}


def product_state(labels: str) -> StateVector:
    """Product state from per-qubit labels in ``0 1 + -``, e.g. ``"0+"``.

    Raises:
        ParseError: For empty input or unknown labels.
    """
    if not labels or any(c not in _LABEL_STATES for c in labels):
        raise ParseError(f"Invalid product-state labels {labels!r}; use 0, 1, + or -")
    amplitudes = np.ones(1, dtype=complex)
    for label in labels:
        amplitudes = np.kron(amplitudes, _LABEL_STATES[label])
    return StateVector(len(labels), amplitudes)


def bell_state(phi: float = 0.0) -> StateVector:
    """``(|00> + e^{i phi}|11>)/sqrt(2)``."""
    return StateVector(2, np.array([1, 0, 0, np.exp(1j * phi)]) * _SQRT2_INV)


def equal_up_to_global_phase(
    a: StateVector, b: StateVector, tol: float = OVERLAP_TOLERANCE
) -> bool:
    """True iff ``|<a|b>| >= 1 - tol``."""
    return abs(a.overlap(b)) >= 1 - tol


def apply_gate(state: StateVector, g: GateOp) -> StateVector:
    """Return ``U|psi>`` for the gate's unitary acting on its support.

    Raises:
        SupportError: If the gate does not fit the state.
    """
    g.check_fits(state.n)
    n, k = state.n, len(g.support)
    tensor = state.amplitudes.reshape([2] * n)
    operator = g.matrix().reshape([2] * (2 * k))
    moved = np.tensordot(operator, tensor, axes=(list(range(k, 2 * k)), list(g.support)))
    result = np.moveaxis(moved, list(range(k)), list(g.support)).reshape(-1)
    logger.debug(f"Applied {g} to {n}-qubit state")
    return StateVector(n, result)


def run_circuit(c: Circuit, initial: StateVector) -> StateVector:
    """Apply the circuit's gates left to right."""
    _check_same_dim(c.n, initial.n)
    state = initial
    for gate in c.gates:
        state = apply_gate(state, gate)
    return state


def _apply_word(amplitudes: np.ndarray, n: int, word: str) -> np.ndarray:
    """Act with an unphased word on raw amplitudes via bit masks."""
    x_mask, z_mask = PauliString(word).to_symplectic()
    indices = np.arange(2**n, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(indices & z_mask) % 2)
    factor = PHASES[word.count("Y") % 4]
    result = np.empty_like(amplitudes)
    result[indices ^ x_mask] = factor * signs * amplitudes
    return result


def apply_pauli(state: StateVector, string: PauliString) -> np.ndarray:
    """Amplitudes of ``P|psi>`` computed without dense matrices."""
    _check_same_dim(state.n, string.n)
    return string.coefficient * _apply_word(state.amplitudes, state.n, string.letters)


def expectation(state: StateVector, obs: PauliSum) -> complex:
    """``<psi|O|psi>`` evaluated term by term.

    Raises:
        DimensionMismatchError: If the observable acts on a different qubit count.
    """
    _check_same_dim(state.n, obs.n)
    total = 0j
    for word, coeff in obs.terms.items():
        applied = _apply_word(state.amplitudes, state.n, word)
        total += coeff * complex(np.vdot(state.amplitudes, applied))
    return total


def reduced_density_matrix(state: StateVector, keep: Iterable[int]) -> np.ndarray:
    """Partial trace over the complement of ``keep``.

    Kept qubits appear in ascending order in the returned matrix.

    Raises:
        SupportError: If ``keep`` is empty or references qubits out of range.
    """
    kept = sorted(set(keep))
    if not kept:
        raise SupportError("Reduced density matrix needs at least one kept qubit")
    if kept[0] < 0 or kept[-1] >= state.n:
        raise SupportError(f"Kept qubits {kept} out of range for n={state.n}")
    traced = [q for q in range(state.n) if q not in kept]
    tensor = state.amplitudes.reshape([2] * state.n)
    matrix = np.transpose(tensor, kept + traced).reshape(2 ** len(kept), -1)
    return matrix @ matrix.conj().T


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary ``U_k ... U_1`` of the whole circuit (verification oracle)."""
    if c.n > DENSE_QUBIT_CAP:
        raise DenseCapError(
            f"Dense unitary limited to {DENSE_QUBIT_CAP} qubits, requested {c.n}"
        )
    unitary = np.eye(2**c.n, dtype=complex)
    for gate in c.gates:
        unitary = gate_unitary(gate, c.n) @ unitary
    return unitary


def gate_unitary(g: GateOp, n: int) -> np.ndarray:
    """Dense ``2^n x 2^n`` embedding of a gate, built column by column."""
    g.check_fits(n)
    columns = [apply_gate(basis_state(n, b), g).amplitudes for b in range(2**n)]
    return np.stack(columns, axis=1)


RANDOM_GATE_SET: tuple[GateKind, ...] = (
    GateKind.H,
    GateKind.S,
    GateKind.CZ,
    GateKind.CX,
    GateKind.PHASE,
)


def random_circuit(
    n: int,
    depth: int,
    rng: np.random.Generator,
    kinds: Sequence[GateKind] = RANDOM_GATE_SET,
) -> Circuit:
    """Draw ``depth`` gates uniformly from ``kinds``; two-qubit kinds need ``n >= 2``."""
    usable = [k for k in kinds if k.arity <= n]
    gates: list[GateOp] = []
    for _ in range(depth):
        kind = usable[int(rng.integers(len(usable)))]
        qubits = tuple(int(q) for q in rng.choice(n, size=kind.arity, replace=False))
        phi = float(rng.uniform(-math.pi, math.pi)) if kind is GateKind.PHASE else None
        gates.append(GateOp(kind, qubits, phi))
    return Circuit(n, tuple(gates))
