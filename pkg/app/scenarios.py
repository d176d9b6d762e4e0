"""Registry of named end-to-end scenarios.

Each scenario takes a ``ScenarioOptions`` tuple and returns a ``Report``
whose checks all pass on a correct build. Scenarios are pure functions of
their options: the same options give byte-identical reports.
"""

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from app.analysis import classical_analogue, locality_analysis
from app.analysis.reports import CheckResult, Report
from app.config import Config
from app.exceptions import UnknownScenarioError
from app.logging_config import get_logger
from app.quantum import heisenberg_backend as heisenberg
from app.quantum import product_form_backend as product_form
from app.quantum.pauli_algebra import DENSE_QUBIT_CAP, PauliString, PauliSum, to_dense
from app.quantum.schrodinger_backend import (
    Circuit,
    GateOp,
    basis_state,
    bell_state,
    circuit_unitary,
    expectation,
    product_state,
    random_circuit,
    run_circuit,
)

logger = get_logger(__name__)

FLIGHT_TIME = 2.0
OBSERVABLES_PER_CIRCUIT = 10
EXPECTATION_TOLERANCE = 1e-9
DENSE_TOLERANCE = 1e-10
DATA_HIDING_GRID = (0.0, math.pi / 7, math.pi / 3, 1.0, math.pi)
AUDIT_PHASES = (math.pi / 7, math.pi / 3, math.pi)


class ScenarioOptions(NamedTuple):
    """Options shared by all scenarios; each scenario reads the ones it needs."""

    phi: float = math.pi
    qubits: int = 4
    depth: int = 20
    seeds: int = 100
    samples: int = 100_000
    seed: int = 20240601
    workers: int = 1
    chsh_settings: int = 10_000

    @classmethod
    def from_config(cls, config_class: type[Config], **overrides: Any) -> "ScenarioOptions":
        """Defaults from a configuration class, then non-None overrides."""
        options = cls(
            phi=config_class.DEFAULT_PHI,
            qubits=config_class.DEFAULT_QUBITS,
            depth=config_class.DEFAULT_DEPTH,
            seeds=config_class.DEFAULT_SEEDS,
            samples=config_class.DEFAULT_SAMPLES,
            seed=config_class.DEFAULT_SEED,
            workers=config_class.SWEEP_WORKERS,
            chsh_settings=config_class.CHSH_SETTINGS,
        )
        return options._replace(**{k: v for k, v in overrides.items() if v is not None})

    def validate(self) -> "ScenarioOptions":
        """Raise ValueError for out-of-range options, otherwise return self."""
        if not math.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi}")
        if not 1 <= self.qubits <= DENSE_QUBIT_CAP:
            raise ValueError(f"qubits must be in 1..{DENSE_QUBIT_CAP}, got {self.qubits}")
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if self.seeds < 1:
            raise ValueError(f"seeds must be >= 1, got {self.seeds}")
        if self.samples < 2:
            raise ValueError(f"samples must be >= 2, got {self.samples}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.chsh_settings < 1:
            raise ValueError(f"chsh_settings must be >= 1, got {self.chsh_settings}")
        return self


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    runner: Callable[[ScenarioOptions], Report]


SCENARIOS: dict[str, Scenario] = {}


def scenario(name: str, description: str):
    """Register the decorated function under ``name``."""

    def register(func: Callable[[ScenarioOptions], Report]):
        SCENARIOS[name] = Scenario(name, description, func)
        return func

    return register


def get_scenario(name: str) -> Scenario:
    """Look up a registered scenario.

    Raises:
        UnknownScenarioError: If ``name`` is not registered.
    """
    try:
        return SCENARIOS[name]
    except KeyError as err:
        raise UnknownScenarioError(
            f"Unknown scenario {name!r}. Available: {', '.join(SCENARIOS)}"
        ) from err


def run_scenario(name: str, options: ScenarioOptions | None = None) -> Report:
    """Validate options, run the scenario and stamp its options into the report.

    Raises:
        UnknownScenarioError: If ``name`` is not registered.
        ValueError: If an option is out of range.
    """
    selected = get_scenario(name)
    options = (options or ScenarioOptions()).validate()
    logger.info(f"Running scenario {name}")
    report = selected.runner(options)
    report.data["scenario"] = name
    report.data["options"] = options._asdict()
    outcome = "passed" if report.passed else "FAILED"
    log = logger.info if report.passed else logger.warning
    log(f"Scenario {name} {outcome} ({len(report.checks)} checks)")
    return report


def _exact(name: str, actual: Any, expected: Any, detail: str) -> CheckResult:
    passed = actual == expected
    return CheckResult(
        name,
        passed,
        detail,
        witnesses=[] if passed else [f"got {actual}", f"expected {expected}"],
    )


def _sum_terms(s: PauliSum) -> list[str]:
    return [
        f"{coeff.real!r}*{word}" if coeff.imag == 0 else f"{coeff!r}*{word}"
        for word, coeff in s.terms.items()
    ]


def _max_dense_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)))


@scenario("cz-entangler", "CZ on |++>: product form, expansion and projector checks")
def cz_entangler(options: ScenarioOptions) -> Report:
    report = Report(title="CZ entangler on |++>")
    start = product_form.init_plus(2)
    cz = GateOp.cz(0, 1)
    entangled = product_form.evolve(start, cz)
    expanded = product_form.expand(entangled)
    expected = PauliSum.from_string("0.25*II + 0.25*XZ + 0.25*ZX + 0.25*YY")

    report.add(
        _exact(
            "initial_generators",
            start.generator_strings(),
            [PauliString.from_string("XI"), PauliString.from_string("IX")],
            "|++> factors are 1/2(I + X1) 1/2(I + X2)",
        )
    )
    report.add(
        _exact(
            "entangled_generators",
            entangled.generator_strings(),
            [PauliString.from_string("+XZ"), PauliString.from_string("+ZX")],
            "CZ maps the generators to +XZ and +ZX with integer phases",
        )
    )
    exact = expanded.isclose(expected, 0.0)
    report.add(
        CheckResult(
            "expanded_state",
            exact,
            f"expanded state {expanded}",
            witnesses=[] if exact else [f"expected {expected}"],
        )
    )

    dense = to_dense(expanded)
    eigenvalues = np.sort(np.linalg.eigvalsh(dense))[::-1]
    projector_gap = float(np.max(np.abs(eigenvalues - [1.0, 0.0, 0.0, 0.0])))
    trace = complex(np.trace(dense))
    report.add(
        CheckResult(
            "rank_one_projector",
            projector_gap <= DENSE_TOLERANCE and abs(trace - 1) <= DENSE_TOLERANCE,
            f"trace {trace.real:.12f}, eigenvalues {np.round(eigenvalues, 12).tolist()}",
            metrics={"eigenvalue_gap": projector_gap},
        )
    )

    state = run_circuit(Circuit(2, (cz,)), product_state("++"))
    oracle_gap = _max_dense_gap(dense, np.outer(state.amplitudes, state.amplitudes.conj()))
    report.add(
        CheckResult(
            "matches_state_vector",
            oracle_gap <= DENSE_TOLERANCE,
            f"max |rho - |psi><psi|| = {oracle_gap:.3e}",
            metrics={"max_deviation": oracle_gap},
        )
    )

    frame = heisenberg.evolve_frame(
        heisenberg.ObservableFrame(
            2,
            {
                "XZ": PauliSum.from_string("XZ"),
                "ZX": PauliSum.from_string("ZX"),
                "YY": PauliSum.from_string("YY"),
            },
            product_state("++"),
        ),
        Circuit(2, (cz,)),
    )
    values = {
        name: heisenberg.heisenberg_expectation(frame, name).real for name in frame.names()
    }
    report.add(
        CheckResult(
            "heisenberg_stabilizers",
            all(abs(v - 1.0) <= EXPECTATION_TOLERANCE for v in values.values()),
            "XZ, ZX and YY all have expectation +1 in the Heisenberg picture",
            metrics=values,
        )
    )
    report.data.update(
        initial_state=start.to_text().splitlines(),
        entangled_state=entangled.to_text().splitlines(),
        expanded_terms=_sum_terms(expanded),
    )
    return report


@scenario("bell-phase-kick", "Phase kick on an entangled pair: factor signs and hiding")
def bell_phase_kick(options: ScenarioOptions) -> Report:
    phi = options.phi
    report = Report(title=f"Phase kick PHASE({phi!r}) on CZ|++>")
    entangled = product_form.evolve(product_form.init_plus(2), GateOp.cz(0, 1))
    kick = GateOp.phase(0, phi)
    kicked = product_form.evolve(entangled, kick)
    # A kick by a multiple of 2 pi is the identity and leaves no history.
    trivial = math.isclose(math.remainder(phi, 2 * math.pi), 0.0, abs_tol=1e-12)

    report.add(
        _exact(
            "changed_factors",
            product_form.changed_factors(entangled, kicked),
            set() if trivial else {0},
            "the kick on qubit 0 changes factor 0 only",
        )
    )
    expected_factor = PauliSum(2, {"XZ": math.cos(phi), "YZ": math.sin(phi)})
    rotated = kicked.generators[0].isclose(expected_factor)
    report.add(
        CheckResult(
            "kicked_factor",
            rotated and kicked.generators[1].isclose(entangled.generators[1], 0.0),
            f"factor 0 = {kicked.generators[0]}, factor 1 = {kicked.generators[1]}",
            witnesses=[] if rotated else [f"expected factor 0 = {expected_factor}"],
        )
    )

    state = run_circuit(Circuit(2, (GateOp.cz(0, 1), kick)), product_state("++"))
    dense_gap = _max_dense_gap(
        to_dense(product_form.expand(kicked)),
        np.outer(state.amplitudes, state.amplitudes.conj()),
    )
    report.add(
        CheckResult(
            "matches_state_vector",
            dense_gap <= DENSE_TOLERANCE,
            f"max |rho - |psi><psi|| = {dense_gap:.3e}",
            metrics={"max_deviation": dense_gap},
        )
    )

    # The pi kick flips the sign of factor 0 exactly.
    pi_kicked = product_form.evolve(entangled, GateOp.phase(0, math.pi))
    pi_expected = PauliSum.from_string("0.25*II - 0.25*XZ + 0.25*ZX - 0.25*YY")
    pi_expanded = product_form.expand(pi_kicked)
    exact = (
        pi_kicked.generator_strings()[0] == PauliString.from_string("-XZ")
        and pi_expanded.isclose(pi_expected, 0.0)
    )
    report.add(
        CheckResult(
            "pi_kick_minus_sign",
            exact,
            f"factor 0 = {pi_kicked.generators[0]}; expanded {pi_expanded}",
            witnesses=[] if exact else [f"expected {pi_expected}"],
        )
    )

    # X on qubit 1 reaches the same pi-kicked state through a different factor history.
    cz_state = locality_analysis.cz_plus_plus_state()
    other = locality_analysis.indistinguishability_check(
        Circuit(2, (GateOp.phase(0, math.pi),)),
        Circuit(2, (GateOp.x(1),)),
        cz_state,
        entangled,
    )
    for check in other.checks:
        report.add(
            CheckResult(
                f"pi_kick_vs_x1_{check.name}",
                check.passed,
                check.detail,
                check.witnesses,
                check.metrics,
            )
        )

    bell = locality_analysis.indistinguishability_check(
        Circuit(2, (GateOp.phase(0, phi),)),
        Circuit(2, (GateOp.phase(1, phi),)),
        bell_state(0.0),
    )
    for check in bell.checks:
        report.add(
            CheckResult(
                f"bell_qubit0_vs_qubit1_{check.name}",
                check.passed,
                check.detail,
                check.witnesses,
                check.metrics,
            )
        )
    recorded = bool(other.data.get("provenance_differs")) and (
        trivial or bool(bell.data.get("provenance_differs"))
    )
    report.add(
        CheckResult(
            "provenance_differs",
            recorded,
            "the factor histories record which qubit was kicked",
        )
    )
    report.data.update(
        entangled_state=entangled.to_text().splitlines(),
        kicked_state=kicked.to_text().splitlines(),
        pi_kicked_terms=_sum_terms(pi_expanded),
        pi_kick_vs_x1=other.data,
        bell_qubit0_vs_qubit1=bell.data,
    )
    return report


@scenario("data-hiding", "Local reductions of phase-carrying entangled states are I/2")
def data_hiding(options: ScenarioOptions) -> Report:
    grid = list(DATA_HIDING_GRID)
    if not any(math.isclose(options.phi, g) for g in grid):
        grid.append(options.phi)
    report = locality_analysis.data_hiding_check(grid)
    report.add(
        locality_analysis.local_unitary_equivalence(
            locality_analysis.cz_plus_plus_state(),
            bell_state(0.0),
            Circuit(2, (GateOp.h(1),)),
        )
    )
    return report


@scenario("chsh", "CHSH values: Tsirelson bound reached, never exceeded")
def chsh(options: ScenarioOptions) -> Report:
    report = Report(title="CHSH violation")
    bound = locality_analysis.TSIRELSON_BOUND
    tol = locality_analysis.CHSH_TOLERANCE
    bell = bell_state(0.0)
    optimal = locality_analysis.chsh_value(bell, *locality_analysis.optimal_chsh_settings())
    report.add(
        CheckResult(
            "bell_optimal",
            abs(optimal - bound) <= tol,
            f"CHSH(Bell, textbook settings) = {optimal!r}",
            metrics={"value": optimal, "tsirelson": bound},
        )
    )

    rng = np.random.default_rng(options.seed)
    for label, state, limit in (
        ("bell", bell, bound),
        ("product_00", basis_state(2, 0), locality_analysis.CLASSICAL_CHSH_BOUND),
    ):
        sweep = locality_analysis.tsirelson_sweep(state, options.chsh_settings, rng)
        largest = sweep.data["max_abs_chsh"]
        report.add(
            CheckResult(
                f"random_settings_{label}",
                largest <= limit + tol,
                f"max |CHSH| over {options.chsh_settings} random settings = {largest!r}",
                metrics={"max_abs_chsh": largest, "limit": limit},
            )
        )

    kicked = {
        f"phase_q{q}": run_circuit(Circuit(2, (GateOp.phase(q, options.phi),)), bell)
        for q in (0, 1)
    }
    kicked["cz_plus_plus"] = locality_analysis.cz_plus_plus_state()
    maxima = {label: locality_analysis.max_chsh(s) for label, s in kicked.items()}
    for label, state in kicked.items():
        settings = locality_analysis.optimal_chsh_settings(state)
        maxima[f"{label}_settings"] = locality_analysis.chsh_value(state, *settings)
    worst = max(abs(v - bound) for v in maxima.values())
    report.add(
        CheckResult(
            "maximal_after_local_kicks",
            worst <= tol,
            "optimal CHSH stays 2 sqrt(2) whichever qubit is kicked",
            metrics=maxima,
        )
    )

    a, _, b, _ = locality_analysis.optimal_chsh_settings()
    degenerate = locality_analysis.chsh_value(bell, a, a, b, b)
    single = 2 * expectation(bell, PauliSum(2, {"ZZ": b[2], "ZX": b[0]})).real
    report.add(
        CheckResult(
            "degenerate_settings",
            abs(degenerate - single) <= tol and degenerate <= 2 + tol,
            f"a = a', b = b' gives 2 E(a, b) = {degenerate!r}",
        )
    )
    report.data.update(optimal_value=optimal, tsirelson_bound=bound)
    return report


@scenario("einstein-audit", "Local gates leave the rest of the register untouched")
def einstein_audit(options: ScenarioOptions) -> Report:
    gates = [GateOp.h(0), GateOp.s(0), GateOp.x(0), GateOp.y(0), GateOp.z(0)]
    gates += [GateOp.phase(0, phi) for phi in (*AUDIT_PHASES, options.phi, 0.0)]
    report = locality_analysis.locality_sweep(2, gates)
    report.title = "Einstein locality audit"

    example = locality_analysis.einstein_locality_audit(
        Circuit(2, (GateOp.cz(0, 1),)), GateOp.phase(0, math.pi), {0}
    )
    for check in example.checks:
        report.add(
            CheckResult(
                f"cz_then_pi_kick_{check.name}",
                check.passed,
                check.detail,
                check.witnesses,
                check.metrics,
            )
        )
    report.data["cz_then_pi_kick"] = example.to_dict()

    if options.qubits >= 3:
        n = options.qubits
        rng = np.random.default_rng(options.seed)
        prefix = random_circuit(n, options.depth, rng)
        initials = [
            product_form.init_plus(n),
            product_form.init_from_strings([PauliString.single(n, q, "Z") for q in range(n)]),
        ]
        two_qubit = [GateOp.cz(0, 1), GateOp.cx(1, 0), GateOp.phase(1, options.phi)]
        wide = locality_analysis.locality_sweep(n, two_qubit, initials, prefix)
        for check in wide.checks:
            check.name = f"{n}_qubit_{check.name}"
            report.add(check)
        report.data["prefix_circuit"] = prefix.to_text().splitlines()
    return report


@scenario("classical-collision", "Elastic collision: conservation and emerging correlations")
def classical_collision(options: ScenarioOptions) -> Report:
    ensemble = classical_analogue.sample_ensemble(
        options.samples, options.seed, workers=options.workers
    )
    return classical_analogue.collision_report(ensemble, FLIGHT_TIME)


def _random_observable(n: int, rng: np.random.Generator) -> PauliSum:
    word = "I" * n
    while word == "I" * n:
        word = "".join(rng.choice(list("IXYZ"), size=n))
    sign = 1.0 if rng.integers(2) == 0 else -1.0
    return PauliSum(n, {word: sign})


def _compare_pictures(n: int, depth: int, seed: int, index: int) -> dict[str, Any]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    c = random_circuit(n, depth, rng)
    initial = product_form.init_plus(n)
    fixed = product_state("+" * n)
    state = run_circuit(c, fixed)
    factored = product_form.evolve_circuit(initial, c)
    rho = product_form.expand(factored)
    unitary = circuit_unitary(c)
    expectation_gap = product_gap = operator_gap = 0.0
    for _ in range(OBSERVABLES_PER_CIRCUIT):
        obs = _random_observable(n, rng)
        evolved = heisenberg.conjugate_circuit(obs, c)
        schrodinger_value = expectation(state, obs)
        heisenberg_value = expectation(fixed, evolved)
        product_value = product_form.density_expectation(rho, obs)
        expectation_gap = max(expectation_gap, abs(schrodinger_value - heisenberg_value))
        product_gap = max(product_gap, abs(schrodinger_value - product_value))
        oracle = unitary.conj().T @ to_dense(obs) @ unitary
        operator_gap = max(operator_gap, _max_dense_gap(to_dense(evolved), oracle))
    density_gap = _max_dense_gap(
        to_dense(rho), np.outer(state.amplitudes, state.amplitudes.conj())
    )
    return {
        "index": index,
        "circuit": c,
        "expectation_gap": expectation_gap,
        "product_expectation_gap": product_gap,
        "operator_gap": operator_gap,
        "density_gap": density_gap,
    }


@scenario("picture-equivalence", "Schrödinger, Heisenberg and product form agree")
def picture_equivalence(options: ScenarioOptions) -> Report:
    n, depth, seeds = options.qubits, options.depth, options.seeds

    def compare(index: int) -> dict[str, Any]:
        return _compare_pictures(n, depth, options.seed, index)

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as executor:
            results = list(executor.map(compare, range(seeds)))
    else:
        results = [compare(index) for index in range(seeds)]

    report = Report(title=f"Picture equivalence on {n} qubits, depth {depth}")
    for key, tolerance, detail in (
        ("expectation_gap", EXPECTATION_TOLERANCE, "Schrödinger vs Heisenberg expectations"),
        (
            "product_expectation_gap",
            EXPECTATION_TOLERANCE,
            "Schrödinger vs product-form trace",
        ),
        ("operator_gap", DENSE_TOLERANCE, "Heisenberg operators vs dense U^dagger O U"),
        ("density_gap", DENSE_TOLERANCE, "product-form expansion vs dense |psi><psi|"),
    ):
        worst = max(r[key] for r in results)
        offenders = [
            f"seed index {r['index']}: {r[key]:.3e} for "
            + "; ".join(str(g) for g in r["circuit"].gates)
            for r in results
            if r[key] > tolerance
        ]
        report.add(
            CheckResult(
                key,
                not offenders,
                f"{detail}: max discrepancy {worst:.3e} over {seeds} circuits",
                witnesses=offenders[:5],
                metrics={"max": worst, "tolerance": tolerance},
            )
        )
    report.data["max_discrepancy"] = max(
        max(r["expectation_gap"], r["product_expectation_gap"]) for r in results
    )
    return report
