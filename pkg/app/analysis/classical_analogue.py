"""Classical c-number analogue: two particles on a line that collide once.

Both particles start from independent phase-space distributions, so the
joint density is a product. An instantaneous elastic collision at ``t0``
swaps momentum between them (positions are continuous, momenta jump) and
free flight then carries the momentum correlation into the positions. The
dynamics are local and deterministic; the correlations come from the shared
history, not from any action at a distance.
"""

import io
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from app.analysis.reports import CheckResult, Report
from app.exceptions import PhysicalParameterError
from app.logging_config import get_logger

logger = get_logger(__name__)

COLUMNS = ("q1", "p1", "q2", "p2")
# Rows drawn from one seed-sequence child; chunks make draws independent of
# how many workers generate them.
CHUNK_SIZE = 4096
MOMENTUM_TOLERANCE = 1e-12
ENERGY_RELATIVE_TOLERANCE = 1e-10
SAMPLING_STANDARD_ERRORS = 4.0


def _check_masses(m1: float, m2: float) -> None:
    if not (m1 > 0 and m2 > 0) or not (math.isfinite(m1) and math.isfinite(m2)):
        raise PhysicalParameterError(f"Masses must be positive and finite, got {m1}, {m2}")


def _check_time(t: float) -> None:
    if not math.isfinite(t) or t < 0:
        raise PhysicalParameterError(f"Flight time must be finite and >= 0, got {t}")


@dataclass(frozen=True, slots=True)
class PhaseSpaceSample:
    """Positions and momenta of both particles at one instant."""

    q1: float
    p1: float
    q2: float
    p2: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise PhysicalParameterError(f"Non-finite phase-space sample {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.q1, self.p1, self.q2, self.p2)


class GaussianMarginal(NamedTuple):
    """Independent Gaussian position and momentum of one particle."""

    q_mean: float
    q_width: float
    p_mean: float
    p_width: float


# Particles approach each other from opposite sides.
DEFAULT_PARTICLE_1 = GaussianMarginal(q_mean=-5.0, q_width=1.0, p_mean=1.0, p_width=0.5)
DEFAULT_PARTICLE_2 = GaussianMarginal(q_mean=5.0, q_width=1.0, p_mean=-1.0, p_width=0.5)


def collide_momenta(
    p1: float | np.ndarray, p2: float | np.ndarray, m1: float, m2: float
) -> tuple[float | np.ndarray, float | np.ndarray]:
    """Post-collision momenta from momentum and kinetic-energy conservation."""
    _check_masses(m1, m2)
    total = m1 + m2
    return (
        ((m1 - m2) * p1 + 2 * m1 * p2) / total,
        ((m2 - m1) * p2 + 2 * m2 * p1) / total,
    )


def collide(s: PhaseSpaceSample, m1: float, m2: float) -> PhaseSpaceSample:
    """Instantaneous elastic collision; positions are unchanged.

    Raises:
        PhysicalParameterError: For nonpositive masses.
    """
    p1, p2 = collide_momenta(s.p1, s.p2, m1, m2)
    return PhaseSpaceSample(s.q1, float(p1), s.q2, float(p2))


def free_flight(s: PhaseSpaceSample, m1: float, m2: float, t: float) -> PhaseSpaceSample:
    """Advance positions by ``(p_i / m_i) t``; momenta are unchanged.

    Raises:
        PhysicalParameterError: For nonpositive masses or negative ``t``.
    """
    _check_masses(m1, m2)
    _check_time(t)
    return PhaseSpaceSample(s.q1 + s.p1 / m1 * t, s.p1, s.q2 + s.p2 / m2 * t, s.p2)


def kinetic_energy(s: PhaseSpaceSample, m1: float, m2: float) -> float:
    return s.p1**2 / (2 * m1) + s.p2**2 / (2 * m2)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Samples of the two-particle phase space with their initial values.

    Attributes:
        coordinates: ``N x 4`` array of ``(q1, p1, q2, p2)`` now.
        initial: ``N x 4`` array of the draws at ``t0``, row-aligned.
        m1: Mass of particle 1.
        m2: Mass of particle 2.
        seed: Seed the initial draws came from.
        collided: Whether the collision has happened.
        time: Flight time since the collision.
    """

    coordinates: np.ndarray
    initial: np.ndarray
    m1: float = 1.0
    m2: float = 1.0
    seed: int = 0
    collided: bool = False
    time: float = 0.0

    def __post_init__(self) -> None:
        _check_masses(self.m1, self.m2)
        coordinates = np.array(self.coordinates, dtype=float)
        initial = np.array(self.initial, dtype=float)
        if coordinates.ndim != 2 or coordinates.shape[1] != 4 or not len(coordinates):
            raise PhysicalParameterError("Ensemble needs a nonempty N x 4 coordinate array")
        if initial.shape != coordinates.shape:
            raise PhysicalParameterError("Initial draws must align with the coordinates")
        if not np.all(np.isfinite(coordinates)):
            raise PhysicalParameterError("Ensemble contains non-finite coordinates")
        coordinates.setflags(write=False)
        initial.setflags(write=False)
        object.__setattr__(self, "coordinates", coordinates)
        object.__setattr__(self, "initial", initial)

    def __len__(self) -> int:
        return len(self.coordinates)

    @property
    def samples(self) -> list[PhaseSpaceSample]:
        return [PhaseSpaceSample(*map(float, row)) for row in self.coordinates]

    def column(self, name: str, initial: bool = False) -> np.ndarray:
        source = self.initial if initial else self.coordinates
        return source[:, COLUMNS.index(name)]

    def to_text(self) -> str:
        """Comma-separated ``q1,p1,q2,p2`` columns with a header row."""
        buffer = io.StringIO()
        np.savetxt(
            buffer,
            self.coordinates,
            delimiter=",",
            header=",".join(COLUMNS),
            comments="",
            fmt="%.17g",
        )
        return buffer.getvalue()


def load_coordinates(text: str) -> np.ndarray:
    """Read an ensemble dump back into an ``N x 4`` array."""
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise PhysicalParameterError(f"Expected 4 columns, found {data.shape[1]}")
    return data


def _draw_chunk(
    seed: int, chunk: int, size: int, particles: tuple[GaussianMarginal, GaussianMarginal]
) -> np.ndarray:
    block = np.empty((size, 4))
    for index, marginal in enumerate(particles):
        # Each particle has its own stream, so the joint draw factorizes.
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk, index)))
        block[:, 2 * index] = rng.normal(marginal.q_mean, marginal.q_width, size)
        block[:, 2 * index + 1] = rng.normal(marginal.p_mean, marginal.p_width, size)
    return block


def sample_ensemble(
    count: int,
    seed: int,
    m1: float = 1.0,
    m2: float = 1.0,
    particle1: GaussianMarginal = DEFAULT_PARTICLE_1,
    particle2: GaussianMarginal = DEFAULT_PARTICLE_2,
    workers: int = 1,
) -> Ensemble:
    """Draw a product-form initial ensemble.

    Rows are generated in fixed-size chunks, each from its own seed-sequence
    child, so the result does not depend on ``workers``.

    Raises:
        PhysicalParameterError: For ``count < 1``, bad masses or nonpositive widths.
    """
    if count < 1:
        raise PhysicalParameterError(f"Ensemble needs at least one sample, got {count}")
    _check_masses(m1, m2)
    for marginal in (particle1, particle2):
        if marginal.q_width <= 0 or marginal.p_width <= 0:
            raise PhysicalParameterError(f"Widths must be positive: {marginal}")
    chunks = [
        (k, min(CHUNK_SIZE, count - k * CHUNK_SIZE))
        for k in range(math.ceil(count / CHUNK_SIZE))
    ]

    def draw(job: tuple[int, int]) -> np.ndarray:
        return _draw_chunk(seed, job[0], job[1], (particle1, particle2))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(draw, chunks))
    else:
        blocks = [draw(job) for job in chunks]
    coordinates = np.vstack(blocks)
    logger.debug(f"Sampled {count} phase-space points with seed {seed}")
    return Ensemble(coordinates, coordinates.copy(), m1, m2, seed)


def evolve_ensemble(e: Ensemble, t: float) -> Ensemble:
    """Collide every sample (once) and then let both particles fly for ``t``.

    An ensemble that has already collided only flies further.

    Raises:
        PhysicalParameterError: For negative ``t``.
    """
    _check_time(t)
    q1, p1, q2, p2 = (e.coordinates[:, k] for k in range(4))
    if not e.collided:
        p1, p2 = collide_momenta(p1, p2, e.m1, e.m2)
    coordinates = np.column_stack((q1 + p1 / e.m1 * t, p1, q2 + p2 / e.m2 * t, p2))
    return Ensemble(coordinates, e.initial, e.m1, e.m2, e.seed, True, e.time + t)


def covariance(e: Ensemble) -> np.ndarray:
    """``4 x 4`` sample covariance of ``(q1, p1, q2, p2)``.

    Raises:
        PhysicalParameterError: For fewer than two samples.
    """
    if len(e) < 2:
        raise PhysicalParameterError("Covariance needs at least two samples")
    return np.cov(e.coordinates, rowvar=False)


def cross_covariance(e: Ensemble) -> np.ndarray:
    """``C[i, j] = cov(current_i, initial_j)``."""
    if len(e) < 2:
        raise PhysicalParameterError("Covariance needs at least two samples")
    joint = np.cov(np.hstack((e.coordinates, e.initial)), rowvar=False)
    return joint[:4, 4:]


def correlation_with_initial(e: Ensemble) -> np.ndarray:
    """Pearson correlation between current and initial coordinates."""
    if len(e) < 2:
        raise PhysicalParameterError("Correlation needs at least two samples")
    joint = np.corrcoef(np.hstack((e.coordinates, e.initial)), rowvar=False)
    return joint[:4, 4:]


def trajectory(
    q0: float | np.ndarray, p0: float | np.ndarray, m: float, t: float
) -> float | np.ndarray:
    """Observables move: ``q(t) = q0 + p0 t / m``."""
    _check_masses(m, m)
    return q0 + p0 / m * t


def liouville_density(
    f0: Callable[[np.ndarray, np.ndarray], np.ndarray],
    q: float | np.ndarray,
    p: float | np.ndarray,
    m: float,
    t: float,
) -> np.ndarray:
    """The density moves instead: ``f(q, p, t) = f0(q - p t / m, p)``."""
    _check_masses(m, m)
    return f0(q - p / m * t, p)


def gaussian_product_density(
    marginal: GaussianMarginal,
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """One-particle density ``N(q) N(p)`` for use with ``liouville_density``."""

    def density(q, p):
        zq = (np.asarray(q) - marginal.q_mean) / marginal.q_width
        zp = (np.asarray(p) - marginal.p_mean) / marginal.p_width
        norm = 2 * math.pi * marginal.q_width * marginal.p_width
        return np.exp(-0.5 * (zq**2 + zp**2)) / norm

    return density


def collision_report(before: Ensemble, t: float) -> Report:
    """Collide and fly an uncollided ensemble, then check the classical claims.

    Checks conservation of momentum and energy per sample, the absence of
    initial cross-particle correlations (within a few standard errors), and,
    for equal masses, the exact momentum swap and the linear growth of
    ``cov(q1(t), p2(t0))``.
    """
    if before.collided:
        raise PhysicalParameterError("Collision report needs an ensemble before the collision")
    after = evolve_ensemble(before, t)
    collided = evolve_ensemble(before, 0.0)
    report = Report(title="Classical collision analogue")
    n = len(before)
    m1, m2 = before.m1, before.m2

    p_before = before.column("p1") + before.column("p2")
    p_after = collided.column("p1") + collided.column("p2")
    momentum_error = float(np.max(np.abs(p_after - p_before)))
    report.add(
        CheckResult(
            "momentum_conservation",
            momentum_error <= MOMENTUM_TOLERANCE,
            f"max |delta p_total| = {momentum_error:.3e}",
            metrics={"max_error": momentum_error},
        )
    )

    def energy(ens: Ensemble) -> np.ndarray:
        return ens.column("p1") ** 2 / (2 * m1) + ens.column("p2") ** 2 / (2 * m2)

    e_before = energy(before)
    energy_error = float(
        np.max(np.abs(energy(collided) - e_before) / np.maximum(e_before, 1e-300))
    )
    report.add(
        CheckResult(
            "energy_conservation",
            energy_error <= ENERGY_RELATIVE_TOLERANCE,
            f"max relative |delta E| = {energy_error:.3e}",
            metrics={"max_relative_error": energy_error},
        )
    )

    tolerance = SAMPLING_STANDARD_ERRORS / math.sqrt(n)
    initial_corr = np.corrcoef(before.initial, rowvar=False)
    cross = {
        f"corr({a},{b})": float(initial_corr[i, j])
        for i, a in ((0, "q1"), (1, "p1"))
        for j, b in ((2, "q2"), (3, "p2"))
    }
    worst = max(abs(v) for v in cross.values())
    report.add(
        CheckResult(
            "initial_factorization",
            worst <= tolerance,
            f"max initial cross-particle |corr| = {worst:.3e} (tolerance {tolerance:.3e})",
            witnesses=[f"{k} = {v:.3e}" for k, v in cross.items() if abs(v) > tolerance],
            metrics=cross,
        )
    )

    correlations = correlation_with_initial(after)
    swap = float(correlations[COLUMNS.index("p1"), COLUMNS.index("p2")])
    cross_cov = cross_covariance(after)
    cov_q1_p2 = float(cross_cov[COLUMNS.index("q1"), COLUMNS.index("p2")])
    report.data.update(
        samples=n,
        seed=before.seed,
        masses=[m1, m2],
        flight_time=t,
        corr_p1_after_p2_initial=swap,
        cov_q1_after_p2_initial=cov_q1_p2,
        covariance_before=covariance(before),
        covariance_after=covariance(after),
    )
    if m1 == m2:
        report.add(
            CheckResult(
                "momentum_swap",
                abs(swap - 1.0) <= MOMENTUM_TOLERANCE,
                f"corr(p1 after, p2 initial) = {swap!r}",
                metrics={"correlation": swap},
            )
        )
        # q1(t) = q1(t0) + p2(t0) t / m exactly, so the sample covariance follows
        initial_cov = np.cov(before.initial, rowvar=False)
        expected = float(initial_cov[0, 3] + initial_cov[3, 3] * t / m1)
        spread = abs(cov_q1_p2 - expected)
        limit = 1e-9 * max(1.0, abs(expected))
        report.add(
            CheckResult(
                "position_correlation_growth",
                spread <= limit,
                f"cov(q1(t), p2(t0)) = {cov_q1_p2:.6g}, var(p2) t / m = {expected:.6g}",
                metrics={"covariance": cov_q1_p2, "expected": expected},
            )
        )
    logger.info(f"Collision analogue on {n} samples: passed={report.passed}")
    return report
