"""Schrödinger picture in product notation.

The density matrix is kept as an ordinary (non-tensor) product of commuting
factors ``rho = prod_j 1/2 (I + G_j)``. Each gate conjugates every generator
forward, ``G_j -> U G_j U^dagger``, and the gate is recorded against exactly
the factors whose generator changed. Provenance is bookkeeping only; no
physics operation reads it.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from app.exceptions import (
    DenseCapError,
    DimensionMismatchError,
    InvalidGeneratorsError,
    ParseError,
)
from app.logging_config import get_logger
from app.quantum.heisenberg_backend import conjugate
from app.quantum.pauli_algebra import (
    DENSE_QUBIT_CAP,
    ZERO_TOLERANCE,
    PauliString,
    PauliSum,
    commutes,
    independent,
    sum_add,
    sum_multiply,
    to_dense,
)
from app.quantum.schrodinger_backend import Circuit, GateOp, StateVector

logger = get_logger(__name__)

PROVENANCE_SEPARATOR = " | provenance: "
TRACE_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class ProvenanceRecord:
    """One gate application that modified a factor.

    Attributes:
        seq: 1-based position of the gate in the state's evolution history.
        gate: The gate that was applied.
    """

    seq: int
    gate: GateOp

    @property
    def support(self) -> tuple[int, ...]:
        return self.gate.support

    def __str__(self) -> str:
        return f"{self.seq}:{self.gate}"

    @classmethod
    def from_string(cls, text: str) -> "ProvenanceRecord":
        seq, separator, gate = text.partition(":")
        if not separator or not seq.strip().isdigit():
            raise ParseError(f"Malformed provenance record {text!r}")
        return cls(int(seq), GateOp.from_string(gate))


def _commutator_vanishes(a: PauliSum, b: PauliSum) -> bool:
    left, right = a.as_pauli_string(), b.as_pauli_string()
    if left is not None and right is not None:
        return commutes(left, right)
    commutator = sum_add(sum_multiply(a, b), -sum_multiply(b, a))
    return all(abs(c) <= ZERO_TOLERANCE for c in commutator.terms.values())


def _factor_changed(before: PauliSum, after: PauliSum) -> bool:
    left, right = before.as_pauli_string(), after.as_pauli_string()
    if left is not None and right is not None:
        return left != right
    return not before.isclose(after, ZERO_TOLERANCE)


@dataclass(frozen=True, eq=False)
class FactoredState:
    """``rho = prod_j 1/2 (I + G_j)`` with per-factor provenance.

    Attributes:
        n: Qubit count.
        generators: One Hermitian generator per factor, pairwise commuting.
        provenance: Per-factor tuple of records for gates that changed it.
        steps: Number of gates applied since initialization.
    """

    n: int
    generators: tuple[PauliSum, ...]
    provenance: tuple[tuple[ProvenanceRecord, ...], ...] = field(default=())
    steps: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) != self.n:
            raise InvalidGeneratorsError(
                f"Expected {self.n} generators, got {len(self.generators)}"
            )
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple(() for _ in self.generators))
        if len(self.provenance) != self.n:
            raise InvalidGeneratorsError("Provenance must hold one entry per factor")
        for index, generator in enumerate(self.generators):
            if generator.n != self.n:
                raise DimensionMismatchError(
                    f"Generator {index} acts on {generator.n} qubits, expected {self.n}"
                )
            if not generator.is_hermitian():
                raise InvalidGeneratorsError(f"Generator {index} is not Hermitian")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if not _commutator_vanishes(self.generators[i], self.generators[j]):
                    raise InvalidGeneratorsError(f"Generators {i} and {j} do not commute")
        strings = self.generator_strings()
        if all(s is not None for s in strings):
            if not independent(strings):
                raise InvalidGeneratorsError("Generators are not independent")
        elif self.n <= DENSE_QUBIT_CAP:
            # Dependent sums multiply out to a projector of trace 0 or above 1.
            trace = expand(self).trace()
            if abs(trace - 1) > TRACE_TOLERANCE:
                raise InvalidGeneratorsError(
                    f"Generators give a state of trace {trace.real:.6g}, expected 1"
                )

    def generator_strings(self) -> list[PauliString | None]:
        """Each generator as an exact signed string, or None once it is a genuine sum."""
        return [g.as_pauli_string() for g in self.generators]

    def to_text(self) -> str:
        """One ``j: <PauliSum> | provenance: <records>`` line per factor."""
        lines = []
        for index, (generator, records) in enumerate(
            zip(self.generators, self.provenance, strict=True)
        ):
            history = ", ".join(str(r) for r in records) or "-"
            lines.append(f"{index}: {generator}{PROVENANCE_SEPARATOR}{history}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FactoredState":
        """Parse the factored-state dump produced by ``to_text``.

        Raises:
            ParseError: Naming the first malformed line.
        """
        generators: list[PauliSum] = []
        provenance: list[tuple[ProvenanceRecord, ...]] = []
        lines = [(k, raw) for k, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
        for number, raw in lines:
            try:
                index, separator, rest = raw.partition(":")
                if not separator or int(index) != len(generators):
                    raise ParseError("Expected factors numbered 0, 1, ... in order")
                body, found, history = rest.partition(PROVENANCE_SEPARATOR.strip())
                if not found:
                    raise ParseError("Missing provenance section")
                generators.append(PauliSum.from_string(body))
                history = history.strip()
                records = (
                    ()
                    if history == "-"
                    else tuple(ProvenanceRecord.from_string(r) for r in history.split(","))
                )
                provenance.append(records)
            except ParseError as err:
                raise ParseError(str(err), number, raw) from err
            except ValueError as err:
                raise ParseError(str(err), number, raw) from err
        if not generators:
            raise ParseError("Empty factored state")
        steps = max((r.seq for records in provenance for r in records), default=0)
        return cls(len(generators), tuple(generators), tuple(provenance), steps)


def init_plus(n: int) -> FactoredState:
    """``prod_j 1/2 (I + X_j)``, the projector onto ``|+>^n``.

    Raises:
        InvalidGeneratorsError: If ``n < 1``.
    """
    if n < 1:
        raise InvalidGeneratorsError(f"Need at least one qubit, got {n}")
    generators = tuple(PauliSum.from_pauli(PauliString.single(n, q, "X")) for q in range(n))
    return FactoredState(n, generators)


def init_from_strings(gens: Sequence[PauliString]) -> FactoredState:
    """Factored state from ``n`` commuting, independent, Hermitian signed strings.

    Raises:
        InvalidGeneratorsError: For empty, mismatched, non-Hermitian,
            non-commuting or dependent generators.
    """
    if not gens:
        raise InvalidGeneratorsError("At least one generator is required")
    n = gens[0].n
    if len(gens) != n or any(g.n != n for g in gens):
        raise InvalidGeneratorsError(f"Need exactly {n} generators on {n} qubits")
    if not all(g.is_hermitian for g in gens):
        raise InvalidGeneratorsError("Generators must have phase +1 or -1")
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if not commutes(a, b):
                raise InvalidGeneratorsError(f"Generators {a} and {b} do not commute")
    if not independent(gens):
        raise InvalidGeneratorsError("Generators are not independent")
    return FactoredState(n, tuple(PauliSum.from_pauli(g) for g in gens))


def _unchecked(
    n: int,
    generators: tuple[PauliSum, ...],
    provenance: tuple[tuple[ProvenanceRecord, ...], ...],
    steps: int,
) -> FactoredState:
    # Conjugation by a unitary keeps the generators Hermitian and commuting.
    state = object.__new__(FactoredState)
    for name, value in (
        ("n", n),
        ("generators", generators),
        ("provenance", provenance),
        ("steps", steps),
    ):
        object.__setattr__(state, name, value)
    return state


def evolve(s: FactoredState, g: GateOp) -> FactoredState:
    """Conjugate each generator forward and record ``g`` on the factors it changed.

    Raises:
        SupportError: If the gate does not fit the state.
    """
    g.check_fits(s.n)
    seq = s.steps + 1
    generators = []
    provenance = []
    for before, records in zip(s.generators, s.provenance, strict=True):
        after = conjugate(before, g, forward=True)
        if _factor_changed(before, after):
            generators.append(after)
            provenance.append(records + (ProvenanceRecord(seq, g),))
        else:
            generators.append(before)
            provenance.append(records)
    changed = [k for k, r in enumerate(provenance) if r and r[-1].seq == seq]
    logger.debug(f"Step {seq}: {g} changed factors {changed}")
    return _unchecked(s.n, tuple(generators), tuple(provenance), seq)


def evolve_circuit(s: FactoredState, c: Circuit) -> FactoredState:
    if c.n != s.n:
        raise DimensionMismatchError(f"Circuit on {c.n} qubits, state on {s.n}")
    for gate in c.gates:
        s = evolve(s, gate)
    return s


def expand(s: FactoredState) -> PauliSum:
    """Multiply the factors out into a canonical tensor-notation sum.

    Raises:
        DenseCapError: If ``n`` exceeds the verification cap.
    """
    if s.n > DENSE_QUBIT_CAP:
        raise DenseCapError(f"Expansion limited to {DENSE_QUBIT_CAP} qubits")
    identity = PauliSum.identity(s.n)
    rho = identity
    for generator in s.generators:
        rho = sum_multiply(rho, 0.5 * (identity + generator))
    return rho


def changed_factors(before: FactoredState, after: FactoredState) -> set[int]:
    """Indices of factors whose generator differs between two states.

    Raises:
        DimensionMismatchError: If the states have different shapes.
    """
    if before.n != after.n or len(before.generators) != len(after.generators):
        raise DimensionMismatchError("Factored states have different shapes")
    return {
        index
        for index, (a, b) in enumerate(zip(before.generators, after.generators, strict=True))
        if _factor_changed(a, b)
    }


def expectation(s: FactoredState, obs: PauliSum) -> complex:
    """``Tr(rho O) = 2^n sum_w rho_w O_w``, using only the expanded Pauli sum."""
    if obs.n != s.n:
        raise DimensionMismatchError(f"Observable on {obs.n} qubits, state on {s.n}")
    return density_expectation(expand(s), obs)


def density_expectation(rho: PauliSum, obs: PauliSum) -> complex:
    """Trace formula for an already expanded density matrix."""
    if obs.n != rho.n:
        raise DimensionMismatchError(f"Observable on {obs.n} qubits, state on {rho.n}")
    return 2**rho.n * sum((rho.coefficient(w) * c for w, c in obs.terms.items()), 0j)


def to_state_vector(s: FactoredState) -> StateVector:
    """Dominant eigenvector of the expanded projector, first nonzero amplitude real."""
    eigenvalues, eigenvectors = np.linalg.eigh(to_dense(expand(s)))
    vector = eigenvectors[:, int(np.argmax(eigenvalues))]
    pivot = vector[np.argmax(np.abs(vector) > 1e-9)]
    vector = vector * (abs(pivot) / pivot)
    return StateVector(s.n, vector / np.linalg.norm(vector))

