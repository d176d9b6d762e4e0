"""Heisenberg-picture backend: observables move, the state stays fixed.

Observables are conjugated gate by gate, ``O -> U^dagger O U``. Clifford
gates map a Pauli string to a single signed Pauli string through the image
tables below; ``PHASE(phi)`` rotates X and Y on the kicked qubit and yields
genuine Pauli sums.

A gate only rewrites letters on its own support, so any string whose support
is disjoint from the gate comes back unchanged.
"""

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from app.exceptions import (
    DimensionMismatchError,
    NonHermitianError,
    ParseError,
    UnknownObservableError,
)
from app.logging_config import get_logger
from app.quantum.pauli_algebra import PauliString, PauliSum, sum_multiply, to_dense
from app.quantum.schrodinger_backend import (
    Circuit,
    GateKind,
    GateOp,
    StateVector,
    basis_state,
    expectation,
    run_circuit,
)

logger = get_logger(__name__)

# U^dagger P U for the X and Z letter at each position of the gate support,
# given as (local word over the support, phase exponent).
CLIFFORD_IMAGES: dict[GateKind, dict[tuple[int, str], tuple[str, int]]] = {
    GateKind.H: {(0, "X"): ("Z", 0), (0, "Z"): ("X", 0)},
    GateKind.S: {(0, "X"): ("Y", 2), (0, "Z"): ("Z", 0)},
    GateKind.X: {(0, "X"): ("X", 0), (0, "Z"): ("Z", 2)},
    GateKind.Y: {(0, "X"): ("X", 2), (0, "Z"): ("Z", 2)},
    GateKind.Z: {(0, "X"): ("X", 2), (0, "Z"): ("Z", 0)},
    GateKind.CZ: {
        (0, "X"): ("XZ", 0),
        (1, "X"): ("ZX", 0),
        (0, "Z"): ("ZI", 0),
        (1, "Z"): ("IZ", 0),
    },
    GateKind.CX: {
        (0, "X"): ("XX", 0),
        (1, "X"): ("IX", 0),
        (0, "Z"): ("ZI", 0),
        (1, "Z"): ("ZZ", 0),
    },
}

# U P U^dagger where it differs from U^dagger P U (all other kinds are involutions)
_FORWARD_OVERRIDES: dict[GateKind, dict[tuple[int, str], tuple[str, int]]] = {
    GateKind.S: {(0, "X"): ("Y", 0), (0, "Z"): ("Z", 0)},
}


def _image_table(kind: GateKind, forward: bool) -> dict[tuple[int, str], tuple[str, int]]:
    if forward and kind in _FORWARD_OVERRIDES:
        return _FORWARD_OVERRIDES[kind]
    return CLIFFORD_IMAGES[kind]


def _embed(n: int, support: tuple[int, ...], local_word: str, phase: int) -> PauliString:
    letters = ["I"] * n
    for qubit, letter in zip(support, local_word, strict=True):
        letters[qubit] = letter
    return PauliString("".join(letters), phase)


def _letter_image(
    table: dict[tuple[int, str], tuple[str, int]],
    n: int,
    support: tuple[int, ...],
    position: int,
    letter: str,
) -> PauliString:
    if letter == "Y":
        # Y = iXZ
        x_image = _letter_image(table, n, support, position, "X")
        z_image = _letter_image(table, n, support, position, "Z")
        return PauliString("I" * n, 1) * x_image * z_image
    word, phase = table[(position, letter)]
    return _embed(n, support, word, phase)


def _conjugate_clifford(string: PauliString, g: GateOp, forward: bool) -> PauliString:
    table = _image_table(g.kind, forward)
    letters = list(string.letters)
    local = [letters[q] for q in g.support]
    for q in g.support:
        letters[q] = "I"
    result = PauliString("".join(letters), string.phase_exp)
    for position, letter in enumerate(local):
        if letter != "I":
            result = result * _letter_image(table, string.n, g.support, position, letter)
    return result


def conjugate_string(
    string: PauliString, g: GateOp, forward: bool = False
) -> PauliString | PauliSum:
    """Conjugate a single Pauli string by a gate.

    Args:
        string: Operator to conjugate.
        g: Gate whose unitary ``U`` is used.
        forward: False for ``U^dagger P U`` (Heisenberg), True for
            ``U P U^dagger`` (Schrödinger evolution of a density factor).

    Returns:
        PauliString | PauliSum: A single signed string for Clifford gates, a
        sum for ``PHASE``.

    Raises:
        SupportError: If the gate does not fit the string's qubit count.
    """
    g.check_fits(string.n)
    if g.kind.is_clifford:
        return _conjugate_clifford(string, g, forward)
    phi = -g.phi if forward else g.phi
    (qubit,) = g.support
    letter = string.letters[qubit]
    if letter in "IZ":
        return PauliSum.from_pauli(string)
    swapped = "Y" if letter == "X" else "X"
    other = PauliString(
        string.letters[:qubit] + swapped + string.letters[qubit + 1 :], string.phase_exp
    )
    cos, sin = math.cos(phi), math.sin(phi)
    if letter == "X":
        # X -> cos(phi) X - sin(phi) Y
        return PauliSum.from_pauli(string, cos) + PauliSum.from_pauli(other, -sin)
    # Y -> sin(phi) X + cos(phi) Y
    return PauliSum.from_pauli(other, sin) + PauliSum.from_pauli(string, cos)


def conjugate(obs: PauliSum | PauliString, g: GateOp, forward: bool = False) -> PauliSum:
    """Return ``U^dagger O U`` (or ``U O U^dagger`` with ``forward=True``).

    Raises:
        SupportError: If the gate does not fit the observable.
    """
    if isinstance(obs, PauliString):
        obs = PauliSum.from_pauli(obs)
    g.check_fits(obs.n)
    terms: dict[str, complex] = {}
    for word, coeff in obs.terms.items():
        image = conjugate_string(PauliString(word), g, forward)
        if isinstance(image, PauliString):
            terms[image.letters] = terms.get(image.letters, 0j) + coeff * image.coefficient
            continue
        for image_word, image_coeff in image.terms.items():
            terms[image_word] = terms.get(image_word, 0j) + coeff * image_coeff
    return PauliSum(obs.n, terms)


def conjugate_circuit(obs: PauliSum | PauliString, c: Circuit) -> PauliSum:
    """``U^dagger O U`` for ``U = U_k ... U_1``; the last gate is applied innermost."""
    result = PauliSum.from_pauli(obs) if isinstance(obs, PauliString) else obs
    if result.n != c.n:
        raise DimensionMismatchError(f"Observable on {result.n} qubits, circuit on {c.n}")
    for gate in reversed(c.gates):
        result = conjugate(result, gate)
    return result


@dataclass(frozen=True, eq=False)
class ObservableFrame:
    """Named Heisenberg observables evaluated against a never-evolving state.

    Attributes:
        n: Qubit count.
        observables: Read-only mapping from opaque name to Hermitian sum.
        fixed_state: The initial state; it is never evolved.
        history: Gates the observables have been conjugated through so far.
        initial_observables: The observables before any conjugation; later
            circuits are composed against these so the newest gate stays innermost.
    """

    n: int
    observables: Mapping[str, PauliSum]
    fixed_state: StateVector
    history: Circuit | None = field(default=None)
    initial_observables: Mapping[str, PauliSum] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.fixed_state.n != self.n:
            raise DimensionMismatchError(
                f"Fixed state has {self.fixed_state.n} qubits, frame has {self.n}"
            )
        for name, obs in self.observables.items():
            if obs.n != self.n:
                raise DimensionMismatchError(f"Observable {name!r} acts on {obs.n} qubits")
            if not obs.is_hermitian():
                raise NonHermitianError(f"Observable {name!r} is not Hermitian")
        object.__setattr__(self, "observables", MappingProxyType(dict(self.observables)))
        if self.history is None:
            object.__setattr__(self, "history", Circuit(self.n))
        initial = self.initial_observables
        if initial is None:
            initial = self.observables
        object.__setattr__(self, "initial_observables", MappingProxyType(dict(initial)))

    def __getitem__(self, name: str) -> PauliSum:
        try:
            return self.observables[name]
        except KeyError as err:
            raise UnknownObservableError(
                f"Unknown observable {name!r}. Available: {sorted(self.observables)}"
            ) from err

    def names(self) -> list[str]:
        return list(self.observables)

    def to_text(self) -> str:
        """One ``name = <PauliSum text>`` line per observable."""
        return "".join(f"{name} = {obs}\n" for name, obs in self.observables.items())

    @classmethod
    def from_text(cls, text: str, fixed_state: StateVector) -> "ObservableFrame":
        """Parse the frame dump format; blank lines and ``#`` comments are skipped.

        Raises:
            ParseError: Naming the first malformed line.
        """
        observables: dict[str, PauliSum] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, separator, expression = line.partition("=")
            name = name.strip()
            if not separator or not name:
                raise ParseError("Expected 'name = <Pauli sum>'", number, raw)
            if name in observables:
                raise ParseError(f"Duplicate observable {name!r}", number, raw)
            try:
                observables[name] = PauliSum.from_string(expression, fixed_state.n)
            except ParseError as err:
                raise ParseError(str(err), number, raw) from err
        return cls(fixed_state.n, observables, fixed_state)


def local_frame(fixed_state: StateVector, letters: Iterable[str] = "XYZ") -> ObservableFrame:
    """Frame of single-qubit observables named as in ``X1 = X⊗I`` (1-based labels)."""
    n = fixed_state.n
    observables = {
        f"{letter}{q + 1}": PauliSum.from_pauli(PauliString.single(n, q, letter))
        for q in range(n)
        for letter in letters
    }
    return ObservableFrame(n, observables, fixed_state)


def evolve_frame(frame: ObservableFrame, c: Circuit) -> ObservableFrame:
    """Conjugate every observable by the full circuit unitary.

    Raises:
        DimensionMismatchError: If the circuit acts on a different qubit count.
    """
    if c.n != frame.n:
        raise DimensionMismatchError(f"Circuit on {c.n} qubits, frame on {frame.n}")
    history = Circuit(frame.n, frame.history.gates + c.gates)
    evolved = {
        name: conjugate_circuit(obs, history)
        for name, obs in frame.initial_observables.items()
    }
    logger.debug(f"Evolved {len(evolved)} observables through {len(history)} gates")
    return ObservableFrame(
        frame.n, evolved, frame.fixed_state, history, frame.initial_observables
    )


def absorb_preparation(
    observables: Mapping[str, PauliSum],
    preparation: Circuit,
    start: StateVector | None = None,
) -> ObservableFrame:
    """Trade an entangled starting state for a product state.

    The state ``P|start>`` is never built. The frame keeps ``start``
    (``|0...0>`` by default) fixed and conjugates every observable through the
    preparation circuit ``P``; circuits evolved afterwards compose after it.

    Raises:
        DimensionMismatchError: If ``start`` and ``preparation`` disagree on ``n``.
    """
    start = start if start is not None else basis_state(preparation.n)
    return evolve_frame(ObservableFrame(start.n, observables, start), preparation)


def heisenberg_expectation(frame: ObservableFrame, name: str) -> complex:
    """Expectation of an evolved observable in the fixed initial state.

    Raises:
        UnknownObservableError: If ``name`` is not in the frame.
    """
    return expectation(frame.fixed_state, frame[name])


def product_expectation(frame: ObservableFrame, names: Iterable[str]) -> complex:
    """Expectation of the ordered product of named observables, formed at query time."""
    product = PauliSum.identity(frame.n)
    for name in names:
        product = sum_multiply(product, frame[name])
    return expectation(frame.fixed_state, product)


def moving_basis_state(a: StateVector, c: Circuit) -> StateVector:
    """``|a_t> = U^dagger |a>``, the basis vector carried backwards by the dynamics."""
    return run_circuit(c.inverse(), a)


def evolve_basis_projector(a: StateVector, c: Circuit) -> np.ndarray:
    """Dense projector ``|a_t><a_t|`` of the moving-basis view."""
    moved = moving_basis_state(a, c).amplitudes
    return np.outer(moved, moved.conj())


def evolve_spectral_decomposition(obs: PauliSum, c: Circuit) -> np.ndarray:
    """Rebuild ``sum_n a_n |a_{n,t}><a_{n,t}|`` from the eigenbasis of ``obs``.

    Agrees with ``to_dense(conjugate_circuit(obs, c))`` for Hermitian ``obs``.
    """
    if not obs.is_hermitian():
        raise NonHermitianError("Spectral evolution needs a Hermitian observable")
    eigenvalues, eigenvectors = np.linalg.eigh(to_dense(obs))
    result = np.zeros((2**obs.n, 2**obs.n), dtype=complex)
    for value, vector in zip(eigenvalues, eigenvectors.T, strict=True):
        result += value * evolve_basis_projector(StateVector(obs.n, vector), c)
    return result
