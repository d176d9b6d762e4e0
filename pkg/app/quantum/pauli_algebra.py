"""Exact Pauli-string and Pauli-sum algebra on n qubits.

Pauli strings keep their phase as an integer power of ``i`` so that products
of Clifford-sector operators are reproduced bit-exactly. Pauli sums are
complex linear combinations of letter words and are used both for observables
and for expanded density matrices. A dense-matrix oracle built with numpy is
provided for brute-force verification only.

Qubit 0 is the leftmost tensor factor, so ``"XI"`` is X on the first qubit.
"""

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from types import MappingProxyType

import numpy as np

from app.exceptions import DenseCapError, ParseError, QubitCountMismatchError

LETTERS = "IXYZ"
ZERO_TOLERANCE = 1e-12
DENSE_QUBIT_CAP = 10

# i**k for k = 0..3, kept exact
PHASES: tuple[complex, ...] = (1 + 0j, 1j, -1 + 0j, -1j)

_PAULI_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (phase exponent, letter) with a*b = i**phase * letter
_LETTER_PRODUCTS: dict[tuple[str, str], tuple[int, str]] = {
    ("X", "Y"): (1, "Z"),
    ("Y", "Z"): (1, "X"),
    ("Z", "X"): (1, "Y"),
    ("Y", "X"): (3, "Z"),
    ("Z", "Y"): (3, "X"),
    ("X", "Z"): (3, "Y"),
}
for _letter in LETTERS:
    _LETTER_PRODUCTS[("I", _letter)] = (0, _letter)
    _LETTER_PRODUCTS[(_letter, "I")] = (0, _letter)
    _LETTER_PRODUCTS[(_letter, _letter)] = (0, "I")

_STRING_PATTERN = re.compile(r"^\s*([+-]?)(i?)([IXYZ]+)\s*$")
_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?"
_TERM_PATTERN = re.compile(
    rf"\s*(?P<sign>[+-])?\s*(?:(?P<coeff>\([^()]*\)|{_NUMBER})\s*\*\s*)?(?P<word>[IXYZ]+)\s*"
)


def _check_letters(letters: str) -> None:
    if not letters or any(c not in LETTERS for c in letters):
        raise ParseError(f"Invalid Pauli word: {letters!r}")


def word_sort_key(word: str) -> tuple[int, ...]:
    """Sort key ordering words as I < X < Y < Z letter by letter."""
    return tuple(LETTERS.index(c) for c in word)


@lru_cache(maxsize=65536)
def multiply_words(a: str, b: str) -> tuple[int, str]:
    """Multiply two letter words.

    Args:
        a: Left word.
        b: Right word of the same length.

    Returns:
        tuple[int, str]: Phase exponent (power of i, mod 4) and product word.
    """
    phase = 0
    letters = []
    for left, right in zip(a, b, strict=True):
        step, letter = _LETTER_PRODUCTS[(left, right)]
        phase += step
        letters.append(letter)
    return phase % 4, "".join(letters)


@dataclass(frozen=True, slots=True)
class PauliString:
    """A phased tensor word ``i**phase_exp * P_0 ⊗ ... ⊗ P_{n-1}``.

    Attributes:
        letters: Word over ``IXYZ``; its length is the qubit count.
        phase_exp: Power of ``i``, always reduced mod 4.

    Example:
        >>> PauliString("XI") * PauliString("IX")
        PauliString(letters='XX', phase_exp=0)
    """

    letters: str
    phase_exp: int = 0

    def __post_init__(self) -> None:
        _check_letters(self.letters)
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        """Return the identity string on ``n`` qubits."""
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        """Return ``letter`` acting on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise QubitCountMismatchError(f"Qubit {qubit} out of range for n={n}")
        return cls("I" * qubit + letter + "I" * (n - qubit - 1))

    @classmethod
    def from_string(cls, text: str) -> "PauliString":
        """Parse ``[+|-][i]WORD``, for example ``"-XZ"`` or ``"+iY"``.

        Raises:
            ParseError: If the text is not a signed Pauli word.
        """
        match = _STRING_PATTERN.match(text)
        if match is None:
            raise ParseError(f"Invalid Pauli string: {text!r}")
        sign, imaginary, letters = match.groups()
        phase = (2 if sign == "-" else 0) + (1 if imaginary else 0)
        return cls(letters, phase)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return PHASES[self.phase_exp]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(k for k, c in enumerate(self.letters) if c != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    def adjoint(self) -> "PauliString":
        return PauliString(self.letters, -self.phase_exp)

    def to_symplectic(self) -> tuple[int, int]:
        """Return ``(x_mask, z_mask)`` with qubit 0 as the most significant bit."""
        x_mask = z_mask = 0
        for k, c in enumerate(self.letters):
            bit = 1 << (self.n - 1 - k)
            if c in "XY":
                x_mask |= bit
            if c in "ZY":
                z_mask |= bit
        return x_mask, z_mask

    def commutes_with(self, other: "PauliString") -> bool:
        return commutes(self, other)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        return multiply(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.letters, self.phase_exp + 2)

    def __str__(self) -> str:
        sign = "-" if self.phase_exp >= 2 else "+"
        imaginary = "i" if self.phase_exp % 2 else ""
        return f"{sign}{imaginary}{self.letters}"


def _canonical_terms(n: int, terms: Mapping[str, complex]) -> dict[str, complex]:
    canonical: dict[str, complex] = {}
    for word, coeff in terms.items():
        _check_letters(word)
        if len(word) != n:
            raise QubitCountMismatchError(
                f"Word {word!r} has length {len(word)}, expected {n}"
            )
        value = complex(coeff)
        if abs(value) >= ZERO_TOLERANCE:
            canonical[word] = value
    return {w: canonical[w] for w in sorted(canonical, key=word_sort_key)}


def _format_coefficient(value: complex) -> tuple[str, str]:
    """Split a coefficient into a joining sign and a magnitude token."""
    if value.imag == 0:
        return ("-" if value.real < 0 else "+"), repr(abs(value.real))
    imag_sign = "-" if value.imag < 0 else "+"
    return "+", f"({value.real!r}{imag_sign}{abs(value.imag)!r}j)"


@dataclass(frozen=True, eq=True)
class PauliSum:
    """Complex linear combination of Pauli words on ``n`` qubits.

    Coefficients below ``ZERO_TOLERANCE`` are pruned at construction and each
    word appears at most once. Instances are immutable.

    Attributes:
        n: Qubit count.
        terms: Read-only mapping from word to complex coefficient.
    """

    n: int
    terms: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise QubitCountMismatchError(f"Qubit count must be >= 1, got {self.n}")
        object.__setattr__(
            self, "terms", MappingProxyType(_canonical_terms(self.n, self.terms))
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def identity(cls, n: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(n, {"I" * n: coeff})

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n, {})

    @classmethod
    def from_pauli(cls, string: PauliString, coeff: complex = 1.0) -> "PauliSum":
        """Lift a phased string into a sum, folding the phase into the coefficient."""
        return cls(string.n, {string.letters: coeff * string.coefficient})

    @classmethod
    def from_string(cls, text: str, n: int | None = None) -> "PauliSum":
        """Parse a ``coeff*WORD ± coeff*WORD`` expression.

        Coefficients are optional (``XZ`` means ``1*XZ``) and may be complex
        literals such as ``(0.5-0.5j)`` or ``0.5j``. The literal ``0`` denotes
        the zero sum and then requires ``n``.

        Raises:
            ParseError: If the expression is malformed.
        """
        text = text.strip()
        if text == "0":
            if n is None:
                raise ParseError("Qubit count required to parse the zero sum")
            return cls.zero(n)
        terms: dict[str, complex] = {}
        position = 0
        while position < len(text):
            match = _TERM_PATTERN.match(text, position)
            if match is None or match.end() == position:
                raise ParseError(f"Malformed Pauli sum near {text[position:]!r}")
            if position > 0 and match.group("sign") is None:
                raise ParseError(f"Missing operator before {match.group(0).strip()!r}")
            word = match.group("word")
            if n is None:
                n = len(word)
            try:
                coeff = complex(match.group("coeff") or 1)
            except ValueError as err:
                raise ParseError(f"Invalid coefficient {match.group('coeff')!r}") from err
            if match.group("sign") == "-":
                coeff = -coeff
            if len(word) != n:
                raise ParseError(f"Word {word!r} does not act on {n} qubits")
            terms[word] = terms.get(word, 0) + coeff
            position = match.end()
        if n is None:
            raise ParseError("Empty Pauli sum")
        return cls(n, terms)

    @property
    def support(self) -> frozenset[int]:
        return support(self)

    def coefficient(self, word: str) -> complex:
        return self.terms.get(word, 0j)

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.n, {w: c.conjugate() for w, c in self.terms.items()})

    def is_hermitian(self, tol: float = ZERO_TOLERANCE) -> bool:
        return hermitian(self, tol)

    def isclose(self, other: "PauliSum", tol: float = ZERO_TOLERANCE) -> bool:
        """Coefficientwise comparison with absolute tolerance ``tol``."""
        _check_same_n(self.n, other.n)
        words = set(self.terms) | set(other.terms)
        return all(
            abs(self.coefficient(w) - other.coefficient(w)) <= tol for w in words
        )

    def trace(self) -> complex:
        """Matrix trace; only the identity word contributes."""
        return self.coefficient("I" * self.n) * 2**self.n

    def inner(self, other: "PauliSum") -> complex:
        """Normalized Hilbert-Schmidt product ``Tr(self^dagger other) / 2^n``."""
        _check_same_n(self.n, other.n)
        return sum(
            (c.conjugate() * other.coefficient(w) for w, c in self.terms.items()), 0j
        )

    def as_pauli_string(self) -> PauliString | None:
        """Return the single phased string this sum equals exactly, if any."""
        if len(self.terms) != 1:
            return None
        ((word, coeff),) = self.terms.items()
        for phase, value in enumerate(PHASES):
            if coeff == value:
                return PauliString(word, phase)
        return None

    def __iter__(self) -> Iterator[tuple[str, complex]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        return sum_add(self, other)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        if not isinstance(other, PauliSum):
            return NotImplemented
        return sum_add(self, sum_scale(other, -1))

    def __neg__(self) -> "PauliSum":
        return sum_scale(self, -1)

    def __mul__(self, other: "PauliSum | complex") -> "PauliSum":
        if isinstance(other, PauliSum):
            return sum_multiply(self, other)
        if isinstance(other, int | float | complex):
            return sum_scale(self, other)
        return NotImplemented

    def __rmul__(self, other: complex) -> "PauliSum":
        if isinstance(other, int | float | complex):
            return sum_scale(self, other)
        return NotImplemented

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for index, (word, coeff) in enumerate(self.terms.items()):
            sign, magnitude = _format_coefficient(coeff)
            if index == 0:
                parts.append(f"{'-' if sign == '-' else ''}{magnitude}*{word}")
            else:
                parts.append(f" {sign} {magnitude}*{word}")
        return "".join(parts)


def _check_same_n(a: int, b: int) -> None:
    if a != b:
        raise QubitCountMismatchError(f"Qubit count mismatch: {a} != {b}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product of two Pauli strings with exact phase bookkeeping.

    Raises:
        QubitCountMismatchError: If the strings act on different qubit counts.
    """
    _check_same_n(a.n, b.n)
    phase, word = multiply_words(a.letters, b.letters)
    return PauliString(word, a.phase_exp + b.phase_exp + phase)


def commutes(a: PauliString, b: PauliString) -> bool:
    """Return True iff ``ab == ba``.

    Two strings commute iff the number of positions where both letters are
    non-identity and different is even.
    """
    _check_same_n(a.n, b.n)
    clashes = sum(
        1
        for x, y in zip(a.letters, b.letters, strict=True)
        if "I" not in (x, y) and x != y
    )
    return clashes % 2 == 0


def sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    _check_same_n(a.n, b.n)
    terms = dict(a.terms)
    for word, coeff in b.terms.items():
        terms[word] = terms.get(word, 0j) + coeff
    return PauliSum(a.n, terms)


def sum_scale(a: PauliSum, c: complex) -> PauliSum:
    return PauliSum(a.n, {w: coeff * c for w, coeff in a.terms.items()})


def sum_multiply(a: PauliSum, b: PauliSum) -> PauliSum:
    """Ordinary (non-tensorial) operator product of two sums."""
    _check_same_n(a.n, b.n)
    terms: dict[str, complex] = {}
    for left, left_coeff in a.terms.items():
        for right, right_coeff in b.terms.items():
            phase, word = multiply_words(left, right)
            terms[word] = terms.get(word, 0j) + left_coeff * right_coeff * PHASES[phase]
    return PauliSum(a.n, terms)


def hermitian(s: PauliSum, tol: float = ZERO_TOLERANCE) -> bool:
    """Return True iff the sum equals its adjoint termwise within ``tol``."""
    return all(abs(c.imag) <= tol for c in s.terms.values())


def support(x: PauliString | PauliSum) -> frozenset[int]:
    """Qubit indices on which any contributing letter is non-identity."""
    if isinstance(x, PauliString):
        return x.support
    qubits: set[int] = set()
    for word in x.terms:
        qubits.update(k for k, c in enumerate(word) if c != "I")
    return frozenset(qubits)


def _check_dense_cap(n: int) -> None:
    if n > DENSE_QUBIT_CAP:
        raise DenseCapError(
            f"Dense oracle limited to {DENSE_QUBIT_CAP} qubits, requested {n}"
        )


def word_to_dense(word: str) -> np.ndarray:
    matrix = np.ones((1, 1), dtype=complex)
    for letter in word:
        matrix = np.kron(matrix, _PAULI_MATRICES[letter])
    return matrix


def to_dense(x: PauliString | PauliSum) -> np.ndarray:
    """Kronecker expansion of a string or sum into a ``2^n x 2^n`` matrix.

    Raises:
        DenseCapError: If ``n`` exceeds ``DENSE_QUBIT_CAP``.
    """
    _check_dense_cap(x.n)
    if isinstance(x, PauliString):
        return x.coefficient * word_to_dense(x.letters)
    matrix = np.zeros((2**x.n, 2**x.n), dtype=complex)
    for word, coeff in x.terms.items():
        matrix += coeff * word_to_dense(word)
    return matrix


def from_dense(matrix: np.ndarray) -> PauliSum:
    """Decompose a dense operator in the Pauli basis (inverse of ``to_dense``).

    Raises:
        DenseCapError: If the matrix is not square with a power-of-two size
            within the oracle cap.
    """
    dim = matrix.shape[0]
    n = dim.bit_length() - 1
    if matrix.shape != (dim, dim) or dim != 2**n or n < 1:
        raise DenseCapError(f"Not a square power-of-two matrix: {matrix.shape}")
    _check_dense_cap(n)
    terms = {
        word: complex(np.trace(word_to_dense(word) @ matrix)) / dim
        for word in all_words(n)
    }
    return PauliSum(n, terms)


def all_words(n: int) -> Iterator[str]:
    """All ``4**n`` words in canonical order, identity first."""
    return ("".join(w) for w in product(LETTERS, repeat=n))


def all_strings(n: int, include_identity: bool = False) -> list[PauliString]:
    """All unsigned Pauli strings on ``n`` qubits."""
    strings = [PauliString(w) for w in all_words(n)]
    return strings if include_identity else strings[1:]


def independent(strings: Iterable[PauliString]) -> bool:
    """GF(2) independence of the strings' symplectic vectors (phases ignored)."""
    pivots: dict[int, int] = {}
    for string in strings:
        x_mask, z_mask = string.to_symplectic()
        vector = (x_mask << string.n) | z_mask
        while vector:
            top = vector.bit_length() - 1
            if top not in pivots:
                pivots[top] = vector
                break
            vector ^= pivots[top]
        else:
            return False
    return True


def format_sum(s: PauliSum) -> str:
    return str(s)


def parse_sum(text: str, n: int | None = None) -> PauliSum:
    return PauliSum.from_string(text, n)
