"""Executable locality checks built on the three backends.

* Einstein locality: a gate confined to a region leaves every property of the
  complement untouched, whichever picture is used to look at it.
* Bell non-locality: the CHSH combination of correlators exceeds the classical
  bound of 2 for entangled states, and never the quantum bound ``2 sqrt(2)``.
* Data hiding: a phase written into an entangled pair is invisible to both
  single-qubit reduced states, and kicking either qubit gives the same state.
"""

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from app.analysis.reports import AuditReport, CheckResult, Report
from app.exceptions import (
    DimensionMismatchError,
    InvalidGeneratorsError,
    NonHermitianError,
    SupportError,
)
from app.logging_config import get_logger
from app.quantum import heisenberg_backend as heisenberg
from app.quantum import product_form_backend as product_form
from app.quantum.pauli_algebra import (
    PauliString,
    PauliSum,
    all_strings,
    commutes,
    independent,
)
from app.quantum.schrodinger_backend import (
    Circuit,
    GateOp,
    StateVector,
    apply_gate,
    bell_state,
    expectation,
    product_state,
    reduced_density_matrix,
    run_circuit,
)

logger = get_logger(__name__)

REDUCED_STATE_TOLERANCE = 1e-12
CHSH_TOLERANCE = 1e-9
CLASSICAL_CHSH_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
# Above this many complement qubits the Heisenberg check only visits
# weight-1 and weight-2 strings.
EXHAUSTIVE_COMPLEMENT_LIMIT = 5

BlochVector = Sequence[float]
Setting = BlochVector | PauliSum


def _complement_strings(n: int, complement: Sequence[int]) -> Iterator[PauliString]:
    if len(complement) <= EXHAUSTIVE_COMPLEMENT_LIMIT:
        weights = range(1, len(complement) + 1)
    else:
        weights = range(1, 3)
    for weight in weights:
        for qubits in itertools.combinations(complement, weight):
            for local in itertools.product("XYZ", repeat=weight):
                letters = ["I"] * n
                for qubit, letter in zip(qubits, local, strict=True):
                    letters[qubit] = letter
                yield PauliString("".join(letters))


def _heisenberg_check(n: int, g: GateOp, complement: Sequence[int]) -> CheckResult:
    moved = []
    visited = 0
    for string in _complement_strings(n, complement):
        visited += 1
        image = heisenberg.conjugate_string(string, g)
        if isinstance(image, PauliSum):
            image = image.as_pauli_string() or image
        if image != string:
            moved.append(f"{string} -> {image}")
    return CheckResult(
        name="heisenberg",
        passed=not moved,
        detail=f"{visited - len(moved)}/{visited} complement strings invariant under {g}",
        witnesses=moved,
        metrics={"strings_checked": visited, "strings_moved": len(moved)},
    )


def _frame_check(
    c: Circuit, g: GateOp, complement: Sequence[int], fixed_state: StateVector
) -> CheckResult:
    frame = heisenberg.ObservableFrame(
        c.n,
        {
            f"{letter}{q + 1}": PauliSum.from_pauli(PauliString.single(c.n, q, letter))
            for q in complement
            for letter in "XYZ"
        },
        fixed_state,
    )
    without = heisenberg.evolve_frame(frame, c)
    with_gate = heisenberg.evolve_frame(without, Circuit(c.n, (g,)))
    moved = [
        f"{name}: {without[name]} -> {with_gate[name]}"
        for name in frame.names()
        if not without[name].isclose(with_gate[name])
    ]
    return CheckResult(
        name="heisenberg_frame",
        passed=not moved,
        detail=f"{len(frame.names()) - len(moved)}/{len(frame.names())} evolved "
        "complement observables unchanged by appending the gate",
        witnesses=moved,
    )


def _product_form_check(
    before: product_form.FactoredState, g: GateOp, region: frozenset[int]
) -> CheckResult:
    after = product_form.evolve(before, g)
    changed = sorted(product_form.changed_factors(before, after))
    offending = []
    for index in changed:
        origin = before.generators[index].support
        if not origin & set(g.support):
            offending.append(
                f"factor {index}: {before.generators[index]} -> {after.generators[index]}"
                f" (originating qubits {sorted(origin)})"
            )
    untouched = [
        index
        for index, generator in enumerate(before.generators)
        if not generator.support & region
    ]
    offending += [f"factor {k} outside region changed" for k in untouched if k in changed]
    return CheckResult(
        name="product_form",
        passed=not offending,
        detail=f"changed factors {changed}; every one originates on the gate support"
        if not offending
        else f"changed factors {changed} include factors off the gate support",
        witnesses=offending,
        metrics={"changed_factors": changed, "factors_outside_region": untouched},
    )


def _schrodinger_check(
    state: StateVector, g: GateOp, complement: Sequence[int]
) -> CheckResult:
    if not complement:
        return CheckResult(
            "schrodinger", True, "region covers every qubit; nothing to compare"
        )
    before = reduced_density_matrix(state, complement)
    after = reduced_density_matrix(apply_gate(state, g), complement)
    deviation = float(np.max(np.abs(after - before)))
    passed = deviation <= REDUCED_STATE_TOLERANCE
    return CheckResult(
        name="schrodinger",
        passed=passed,
        detail=f"reduced state on qubits {list(complement)} moved by at most {deviation:.3e}",
        witnesses=[] if passed else [f"max |delta rho| = {deviation:.3e}"],
        metrics={"max_deviation": deviation},
    )


def einstein_locality_audit(
    c: Circuit,
    g: GateOp,
    region: Iterable[int],
    initial: product_form.FactoredState | None = None,
) -> AuditReport:
    """Check that ``g`` cannot affect anything outside ``region`` after ``c``.

    Four checks are reported: every Pauli string on the complement is exactly
    invariant under conjugation by ``g``; the complement's local observables,
    evolved through ``c``, do not change when ``g`` is appended; in product
    form, every factor changed by ``g`` had its generator on the gate support;
    and the reduced state of the complement is unchanged.

    Args:
        c: Circuit applied before ``g``.
        g: Gate under audit. ``PHASE(0)`` serves as the identity gate.
        region: Qubits the gate is allowed to touch.
        initial: Starting stabilizer state, ``|+>^n`` when omitted.

    Returns:
        AuditReport: One check per picture, with the strings or factors that
        moved as witnesses.

    Raises:
        SupportError: If the gate leaves the region or the region leaves the
            register.
    """
    region = frozenset(region)
    g.check_fits(c.n)
    if not set(g.support) <= region:
        raise SupportError(f"Gate {g} acts outside region {sorted(region)}")
    if any(q < 0 or q >= c.n for q in region):
        raise SupportError(f"Region {sorted(region)} out of range for n={c.n}")
    initial = initial if initial is not None else product_form.init_plus(c.n)
    if initial.n != c.n:
        raise DimensionMismatchError(f"Initial state on {initial.n} qubits, circuit on {c.n}")

    complement = [q for q in range(c.n) if q not in region]
    fixed_state = product_form.to_state_vector(initial)
    report = AuditReport(
        title=f"Einstein locality audit: {g} in region {sorted(region)}",
        data={
            "circuit": [str(gate) for gate in c.gates],
            "gate": str(g),
            "region": sorted(region),
            "complement": complement,
            "initial": [str(s) for s in initial.generators],
        },
    )
    report.add(_heisenberg_check(c.n, g, complement))
    if complement:
        report.add(_frame_check(c, g, complement, fixed_state))
    report.add(_product_form_check(product_form.evolve_circuit(initial, c), g, region))
    report.add(_schrodinger_check(run_circuit(c, fixed_state), g, complement))
    for check in report.checks:
        if not check.passed:
            logger.warning(f"Locality check {check.name} failed for {g}: {check.witnesses}")
    return report


def stabilizer_states(n: int) -> list[product_form.FactoredState]:
    """Every ``n``-qubit stabilizer state, one generator set per state.

    Practical for ``n <= 3``.
    """
    words = all_strings(n)
    seen: set[frozenset[str]] = set()
    states = []
    for combo in itertools.combinations(words, n):
        if not all(commutes(a, b) for a, b in itertools.combinations(combo, 2)):
            continue
        if not independent(combo):
            continue
        group = frozenset(_group_words(combo))
        if group in seen:
            continue
        seen.add(group)
        for signs in itertools.product((0, 2), repeat=n):
            generators = [
                PauliString(s.letters, sign) for s, sign in zip(combo, signs, strict=True)
            ]
            states.append(product_form.init_from_strings(generators))
    return states


def _group_words(generators: Sequence[PauliString]) -> Iterator[str]:
    for mask in range(1, 2 ** len(generators)):
        element = PauliString.identity(generators[0].n)
        for index, generator in enumerate(generators):
            if mask >> index & 1:
                element = element * generator
        yield element.letters


def locality_sweep(
    n: int,
    gates: Sequence[GateOp],
    initials: Sequence[product_form.FactoredState] | None = None,
    prefix: Circuit | None = None,
) -> Report:
    """Audit every gate against every region containing its support.

    Args:
        n: Qubit count.
        gates: Gates to audit.
        initials: Initial states; every stabilizer state when omitted.
        prefix: Circuit run before each gate, empty by default.
    """
    initials = list(initials) if initials is not None else stabilizer_states(n)
    prefix = prefix or Circuit(n)
    report = Report(title=f"Einstein locality sweep on {n} qubits")
    failures: list[str] = []
    audits = 0
    for g in gates:
        others = [q for q in range(n) if q not in g.support]
        for extra in range(len(others) + 1):
            for added in itertools.combinations(others, extra):
                region = set(g.support) | set(added)
                for initial in initials:
                    audits += 1
                    audit = einstein_locality_audit(prefix, g, region, initial)
                    label = ", ".join(map(str, initial.generators))
                    failures += [
                        f"{g} region {sorted(region)} [{label}]: {check.name}"
                        for check in audit.checks
                        if not check.passed
                    ]
    report.add(
        CheckResult(
            name="einstein_locality",
            passed=not failures,
            detail=f"{audits - len(failures)}/{audits} audits passed",
            witnesses=failures,
            metrics={"audits": audits, "initial_states": len(initials)},
        )
    )
    logger.info(f"Locality sweep on {n} qubits: {audits} audits, {len(failures)} failures")
    return report


def data_hiding_check(phi_grid: Sequence[float]) -> Report:
    """Both single-qubit reductions of ``(|00> + e^{i phi}|11>)/sqrt2`` equal ``I/2``.

    The same test is applied to the CZ-entangled state ``(|0+> + |1->)/sqrt2``.

    Raises:
        ValueError: If the grid is empty.
    """
    if len(phi_grid) == 0:
        raise ValueError("Phase grid must not be empty")
    report = Report(title="Quantum data hiding")
    states = [(f"bell phi={phi:.6g}", bell_state(phi)) for phi in phi_grid]
    states.append(("cz|++>", cz_plus_plus_state()))
    deviations = {}
    for label, state in states:
        deviation = max(
            float(np.max(np.abs(reduced_density_matrix(state, [q]) - np.eye(2) / 2)))
            for q in (0, 1)
        )
        deviations[label] = deviation
        passed = deviation <= REDUCED_STATE_TOLERANCE
        report.add(
            CheckResult(
                name=label,
                passed=passed,
                detail=f"both reductions within {deviation:.3e} of I/2",
                witnesses=[] if passed else [f"max |rho - I/2| = {deviation:.3e}"],
                metrics={"max_deviation": deviation},
            )
        )
    report.data["max_deviation"] = deviations
    return report


def cz_plus_plus_state() -> StateVector:
    """``CZ|++> = (|0+> + |1->)/sqrt2``."""
    return run_circuit(Circuit(2, (GateOp.cz(0, 1),)), product_state("++"))


def setting_observable(setting: Setting) -> PauliSum:
    """One-qubit observable ``a . sigma`` for a unit Bloch vector or a unit Pauli sum.

    Raises:
        NonHermitianError: If the observable is not Hermitian.
        ValueError: If it is not a unit-norm real combination of X, Y and Z.
    """
    if isinstance(setting, PauliSum):
        if setting.n != 1:
            raise DimensionMismatchError("A CHSH setting acts on exactly one qubit")
        if not setting.is_hermitian():
            raise NonHermitianError(f"Setting {setting} is not Hermitian")
        vector = [setting.coefficient(letter).real for letter in "XYZ"]
        if abs(setting.coefficient("I")) > CHSH_TOLERANCE:
            raise ValueError(f"Setting {setting} has an identity component")
    else:
        vector = [float(v) for v in setting]
        if len(vector) != 3:
            raise ValueError(f"Bloch vector needs three components, got {len(vector)}")
    if abs(math.fsum(v * v for v in vector) - 1.0) > CHSH_TOLERANCE:
        raise ValueError(f"Setting {vector} is not a unit vector")
    return PauliSum(1, {letter: v for letter, v in zip("XYZ", vector, strict=True)})


def _correlator(state: StateVector, a: PauliSum, b: PauliSum) -> float:
    terms: dict[str, complex] = {}
    for left, ca in a.terms.items():
        for right, cb in b.terms.items():
            terms[left + right] = ca * cb
    return expectation(state, PauliSum(2, terms)).real


def chsh_value(state: StateVector, a: Setting, a2: Setting, b: Setting, b2: Setting) -> float:
    """``E(a,b) + E(a,b') + E(a',b) - E(a',b')`` with ``a`` on qubit 0, ``b`` on qubit 1.

    Raises:
        DimensionMismatchError: If the state is not a two-qubit state.
    """
    if state.n != 2:
        raise DimensionMismatchError(f"CHSH needs a two-qubit state, got {state.n} qubits")
    a, a2, b, b2 = (setting_observable(s) for s in (a, a2, b, b2))
    return (
        _correlator(state, a, b)
        + _correlator(state, a, b2)
        + _correlator(state, a2, b)
        - _correlator(state, a2, b2)
    )


def correlation_matrix(state: StateVector) -> np.ndarray:
    """``T_ij = <sigma_i (x) sigma_j>`` over ``i, j`` in X, Y, Z."""
    if state.n != 2:
        raise DimensionMismatchError(f"Correlations need a two-qubit state, got {state.n}")
    return np.array(
        [
            [expectation(state, PauliSum(2, {left + right: 1.0})).real for right in "XYZ"]
            for left in "XYZ"
        ]
    )


def max_chsh(state: StateVector) -> float:
    """Largest CHSH value over all settings, ``2 sqrt(l1 + l2)`` from ``T^T T``."""
    t = correlation_matrix(state)
    eigenvalues = np.sort(np.linalg.eigvalsh(t.T @ t))
    return float(2.0 * math.sqrt(max(eigenvalues[-1] + eigenvalues[-2], 0.0)))


def _unit(vector: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vector))
    return vector / norm if norm > CHSH_TOLERANCE else fallback


def optimal_chsh_settings(
    state: StateVector | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Bloch vectors ``(a, a', b, b')`` that reach ``max_chsh``.

    Without a state, the textbook settings for ``(|00> + |11>)/sqrt2`` are
    returned: ``a = Z``, ``a' = X``, ``b = (Z + X)/sqrt2``, ``b' = (Z - X)/sqrt2``.
    """
    if state is None:
        z, x = np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])
        return z, x, (z + x) / math.sqrt(2), (z - x) / math.sqrt(2)
    t = correlation_matrix(state)
    _, vectors = np.linalg.eigh(t.T @ t)
    u, v = vectors[:, -1], vectors[:, -2]
    tu, tv = t @ u, t @ v
    theta = math.atan2(float(np.linalg.norm(tv)), float(np.linalg.norm(tu)))
    a = _unit(tu, np.array([0.0, 0.0, 1.0]))
    a2 = _unit(tv, np.array([1.0, 0.0, 0.0]))
    b = math.cos(theta) * u + math.sin(theta) * v
    b2 = math.cos(theta) * u - math.sin(theta) * v
    return a, a2, b, b2


def random_settings(rng: np.random.Generator, count: int) -> np.ndarray:
    """``count x 4 x 3`` array of uniformly random unit Bloch vectors."""
    draws = rng.normal(size=(count, 4, 3))
    return draws / np.linalg.norm(draws, axis=-1, keepdims=True)


def tsirelson_sweep(state: StateVector, count: int, rng: np.random.Generator) -> Report:
    """Evaluate CHSH at ``count`` random setting quadruples.

    Correlators are bilinear in the settings, ``E(a, b) = a . T b``, so the
    sweep uses the correlation matrix rather than one expectation per setting.
    """
    if count < 1:
        raise ValueError(f"Sweep needs at least one setting quadruple, got {count}")
    t = correlation_matrix(state)
    settings = random_settings(rng, count)
    a, a2, b, b2 = (settings[:, k] for k in range(4))

    def corr(left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return np.einsum("ki,ij,kj->k", left, t, right)

    values = corr(a, b) + corr(a, b2) + corr(a2, b) - corr(a2, b2)
    largest = float(np.max(np.abs(values)))
    report = Report(title="CHSH random-settings sweep")
    passed = largest <= TSIRELSON_BOUND + CHSH_TOLERANCE
    report.add(
        CheckResult(
            name="tsirelson",
            passed=passed,
            detail=f"max |CHSH| over {count} settings = {largest:.12f}",
            witnesses=[] if passed else [f"{largest!r} > {TSIRELSON_BOUND!r}"],
            metrics={"max_abs_chsh": largest, "count": count},
        )
    )
    report.data.update(
        max_abs_chsh=largest,
        exceeds_classical=largest > CLASSICAL_CHSH_BOUND + CHSH_TOLERANCE,
    )
    return report


def factored_from_state(state: StateVector, tol: float = 1e-9) -> product_form.FactoredState:
    """Recover a product-form description of a stabilizer state.

    Every Hermitian Pauli string with expectation ``+-1`` stabilizes the
    state up to sign; ``n`` independent ones are kept.

    Raises:
        InvalidGeneratorsError: If ``state`` is not a stabilizer state.
    """
    chosen: list[PauliString] = []
    for string in all_strings(state.n):
        value = expectation(state, PauliSum.from_pauli(string)).real
        if abs(abs(value) - 1.0) > tol:
            continue
        candidate = string if value > 0 else -string
        if independent([*chosen, candidate]):
            chosen.append(candidate)
        if len(chosen) == state.n:
            return product_form.init_from_strings(chosen)
    raise InvalidGeneratorsError("State is not a stabilizer state")


def indistinguishability_check(
    c1: Circuit,
    c2: Circuit,
    initial: StateVector,
    initial_factored: product_form.FactoredState | None = None,
) -> Report:
    """Compare two different dynamics that may lead to the same global state.

    The report passes iff the circuits differ while the final states agree up
    to a global phase. When a product-form description of ``initial`` is
    available (given or recovered from a stabilizer state), both provenances
    and expanded states are reported too.

    Raises:
        DimensionMismatchError: If the circuits or state disagree on ``n``.
    """
    if not c1.n == c2.n == initial.n:
        raise DimensionMismatchError(
            f"Circuits on {c1.n} and {c2.n} qubits, initial state on {initial.n}"
        )
    first, second = run_circuit(c1, initial), run_circuit(c2, initial)
    overlap = abs(first.overlap(second))
    equal = first.equivalent(second)
    differ = c1.gates != c2.gates
    report = Report(
        title="Indistinguishability of different dynamics",
        data={
            "circuit_1": [str(g) for g in c1.gates],
            "circuit_2": [str(g) for g in c2.gates],
            "overlap": overlap,
            "states_equal": equal,
            "distinguishable": not equal,
        },
    )
    report.add(
        CheckResult(
            name="states_equal",
            passed=equal,
            detail=f"|<psi1|psi2>| = {overlap:.12f}",
            metrics={"overlap": overlap},
        )
    )
    report.add(
        CheckResult(
            name="circuits_differ",
            passed=differ,
            detail="the two circuits differ" if differ else "the two circuits are identical",
        )
    )
    if initial_factored is None:
        try:
            initial_factored = factored_from_state(initial)
        except InvalidGeneratorsError:
            logger.debug("Initial state has no product-form description; skipping provenance")
    if initial_factored is not None:
        _add_provenance(report, c1, c2, initial_factored)
    return report


def _add_provenance(
    report: Report, c1: Circuit, c2: Circuit, initial: product_form.FactoredState
) -> None:
    after1 = product_form.evolve_circuit(initial, c1)
    after2 = product_form.evolve_circuit(initial, c2)
    provenance1 = [[str(r) for r in records] for records in after1.provenance]
    provenance2 = [[str(r) for r in records] for records in after2.provenance]
    expanded1, expanded2 = product_form.expand(after1), product_form.expand(after2)
    report.data.update(
        changed_factors_1=sorted(product_form.changed_factors(initial, after1)),
        changed_factors_2=sorted(product_form.changed_factors(initial, after2)),
        provenance_1=provenance1,
        provenance_2=provenance2,
        provenance_differs=provenance1 != provenance2,
        factored_1=after1.to_text().splitlines(),
        factored_2=after2.to_text().splitlines(),
    )
    equal = expanded1.isclose(expanded2, 1e-10)
    report.add(
        CheckResult(
            name="expanded_equal",
            passed=equal,
            detail="expanded density matrices agree termwise"
            if equal
            else "expanded density matrices differ",
            witnesses=[] if equal else [f"{expanded1}  vs  {expanded2}"],
        )
    )


def local_unitary_equivalence(
    source: StateVector, target: StateVector, local: Circuit
) -> CheckResult:
    """Check that a circuit of single-qubit gates maps ``source`` onto ``target``.

    Raises:
        ValueError: If ``local`` contains a multi-qubit gate.
    """
    if any(len(g.support) > 1 for g in local.gates):
        raise ValueError("Local equivalence only admits single-qubit gates")
    overlap = abs(run_circuit(local, source).overlap(target))
    passed = overlap >= 1 - 1e-10
    return CheckResult(
        name="local_unitary_equivalence",
        passed=passed,
        detail=f"|<target|V source>| = {overlap:.12f} with V = "
        + (", ".join(str(g) for g in local.gates) or "identity"),
        metrics={"overlap": overlap},
    )

