"""Unit tests for the product-form (factored density matrix) backend."""

import math

import numpy as np
import pytest

from app.exceptions import (
    DenseCapError,
    DimensionMismatchError,
    InvalidGeneratorsError,
    ParseError,
    SupportError,
)
from app.quantum.pauli_algebra import PauliString, PauliSum, to_dense
from app.quantum.product_form_backend import (
    FactoredState,
    ProvenanceRecord,
    changed_factors,
    evolve,
    evolve_circuit,
    expand,
    expectation,
    init_from_strings,
    init_plus,
    to_state_vector,
)
from app.quantum.schrodinger_backend import (
    Circuit,
    GateOp,
    product_state,
    random_circuit,
    run_circuit,
)
from app.quantum.schrodinger_backend import expectation as state_expectation


def strings(*texts):
    return [PauliString.from_string(t) for t in texts]


@pytest.mark.unit
class TestInitialization:
    """Test suite for building factored states."""

    @pytest.mark.unit
    def test_init_plus(self):
        """Test that |+>^n has generators X_j and no provenance."""
        state = init_plus(3)
        assert state.generator_strings() == strings("XII", "IXI", "IIX")
        assert state.provenance == ((), (), ())
        assert state.steps == 0
        with pytest.raises(InvalidGeneratorsError):
            init_plus(0)

    @pytest.mark.unit
    def test_init_from_strings_accepts_signed_generators(self):
        """Test a Bell-type stabilizer set with a minus sign."""
        state = init_from_strings(strings("XX", "-ZZ"))
        assert state.generator_strings()[1] == PauliString("ZZ", 2)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "gens",
        [
            [],
            ["XI", "ZI"],
            ["XX", "XX"],
            ["XX", "ZZ", "YY"],
            ["+iXX", "ZZ"],
            ["XX", "Z"],
        ],
        ids=["empty", "anticommuting", "dependent", "too-many", "phase-i", "mixed-n"],
    )
    def test_init_from_strings_rejects_bad_sets(self, gens):
        """Test validation of candidate generator sets."""
        with pytest.raises(InvalidGeneratorsError):
            init_from_strings(strings(*gens))

    @pytest.mark.unit
    def test_direct_construction_validates_commutation(self):
        """Test that FactoredState itself checks its generators."""
        with pytest.raises(InvalidGeneratorsError):
            FactoredState(2, (PauliSum.from_string("XI"), PauliSum.from_string("ZI")))
        with pytest.raises(InvalidGeneratorsError):
            FactoredState(2, (PauliSum.from_string("XI"),))
        with pytest.raises(DimensionMismatchError):
            FactoredState(1, (PauliSum.from_string("XX"),))

    @pytest.mark.unit
    def test_direct_construction_rejects_dependent_generators(self):
        """Test that repeated or product generators are rejected."""
        with pytest.raises(InvalidGeneratorsError, match="not independent"):
            FactoredState(2, (PauliSum.from_string("ZI"), PauliSum.from_string("ZI")))
        with pytest.raises(InvalidGeneratorsError, match="not independent"):
            FactoredState(
                3,
                (
                    PauliSum.from_string("ZII"),
                    PauliSum.from_string("IZI"),
                    PauliSum.from_string("ZZI"),
                ),
            )

    @pytest.mark.unit
    def test_direct_construction_checks_trace_of_sums(self):
        """Test that a repeated genuine-sum generator fails the trace check."""
        kicked = PauliSum(2, {"XZ": math.cos(0.4), "YZ": math.sin(0.4)})
        with pytest.raises(InvalidGeneratorsError, match="trace 2"):
            FactoredState(2, (kicked, kicked))


@pytest.mark.unit
class TestEvolution:
    """Test suite for forward conjugation and provenance."""

    @pytest.mark.unit
    def test_cz_entangles_the_generators(self):
        """Test X1, X2 -> X1 Z2, Z1 X2 with provenance on both factors."""
        gate = GateOp.cz(0, 1)
        state = evolve(init_plus(2), gate)
        assert state.generator_strings() == strings("XZ", "ZX")
        assert state.provenance == (
            (ProvenanceRecord(1, gate),),
            (ProvenanceRecord(1, gate),),
        )
        assert state.steps == 1

    @pytest.mark.unit
    def test_expanded_cz_state(self):
        """Test the multiplied-out projector 1/4 (II + XZ + ZX + YY)."""
        rho = expand(evolve(init_plus(2), GateOp.cz(0, 1)))
        expected = PauliSum(2, {"II": 0.25, "XZ": 0.25, "ZX": 0.25, "YY": 0.25})
        assert rho.isclose(expected, 0.0)

    @pytest.mark.unit
    def test_phase_kick_changes_only_its_factor(self):
        """Test that a kick on qubit 0 only touches factor 0."""
        phi = 0.9
        entangled = evolve(init_plus(2), GateOp.cz(0, 1))
        kicked = evolve(entangled, GateOp.phase(0, phi))
        assert changed_factors(entangled, kicked) == {0}
        expected = PauliSum(2, {"XZ": math.cos(phi), "YZ": math.sin(phi)})
        assert kicked.generators[0].isclose(expected)
        assert kicked.generator_strings()[0] is None
        assert len(kicked.provenance[0]) == 2
        assert len(kicked.provenance[1]) == 1

    @pytest.mark.unit
    def test_unchanged_factor_gets_no_record(self):
        """Test that a gate is recorded only where the generator moved."""
        state = evolve(init_plus(2), GateOp.z(0))
        assert state.generator_strings() == strings("-XI", "IX")
        assert state.provenance[1] == ()
        assert changed_factors(init_plus(2), state) == {0}

    @pytest.mark.unit
    @pytest.mark.parametrize("phi", [0.0, 2 * math.pi])
    def test_trivial_phase_changes_nothing(self, phi):
        """Test that PHASE(0) and PHASE(2 pi) leave every factor in place."""
        state = evolve(init_plus(2), GateOp.phase(0, phi))
        assert changed_factors(init_plus(2), state) == set()
        assert state.provenance == ((), ())
        assert state.steps == 1

    @pytest.mark.unit
    def test_gate_must_fit(self):
        """Test the support check."""
        with pytest.raises(SupportError):
            evolve(init_plus(1), GateOp.cz(0, 1))
        with pytest.raises(DimensionMismatchError):
            evolve_circuit(init_plus(2), Circuit(3))
        with pytest.raises(DimensionMismatchError):
            changed_factors(init_plus(2), init_plus(3))


@pytest.mark.unit
class TestAgreementWithStateVector:
    """Test suite comparing the product form to the state-vector backend."""

    @pytest.mark.unit
    def test_expanded_projector_matches_dense(self, rng):
        """Test that expand() equals |psi><psi| for random circuits."""
        for _ in range(4):
            circuit = random_circuit(3, 20, rng)
            rho = expand(evolve_circuit(init_plus(3), circuit))
            psi = run_circuit(circuit, product_state("+++")).amplitudes
            assert np.allclose(to_dense(rho), np.outer(psi, psi.conj()), atol=1e-10)

    @pytest.mark.unit
    def test_expectation_matches_state_vector(self, rng):
        """Test Tr(rho O) against <psi|O|psi>."""
        circuit = random_circuit(3, 20, rng)
        obs = PauliSum.from_string("0.3*XYZ - ZII + 0.5*IXX")
        factored = evolve_circuit(init_plus(3), circuit)
        final = run_circuit(circuit, product_state("+++"))
        assert expectation(factored, obs) == pytest.approx(
            state_expectation(final, obs), abs=1e-10
        )
        with pytest.raises(DimensionMismatchError):
            expectation(factored, PauliSum.from_string("XX"))

    @pytest.mark.unit
    def test_to_state_vector(self, rng):
        """Test recovery of the pure state up to a global phase."""
        circuit = random_circuit(2, 15, rng)
        recovered = to_state_vector(evolve_circuit(init_plus(2), circuit))
        assert recovered.equivalent(run_circuit(circuit, product_state("++")))

    @pytest.mark.unit
    def test_expand_respects_dense_cap(self):
        """Test that expansion refuses very large registers."""
        with pytest.raises(DenseCapError):
            expand(init_plus(11))


@pytest.mark.unit
class TestFactoredText:
    """Test suite for the factored-state text dump."""

    @pytest.mark.unit
    def test_dump_format(self):
        """Test the per-factor line layout."""
        state = evolve(init_plus(2), GateOp.cz(0, 1))
        lines = state.to_text().splitlines()
        assert lines[0] == "0: 1.0*XZ | provenance: 1:CZ 0 1"
        assert init_plus(1).to_text() == "0: 1.0*X | provenance: -\n"

    @pytest.mark.unit
    def test_dump_parses_back(self):
        """Test that a dumped state parses to the same generators and history."""
        circuit = Circuit(2, (GateOp.cz(0, 1), GateOp.phase(0, 0.4), GateOp.h(1)))
        state = evolve_circuit(init_plus(2), circuit)
        parsed = FactoredState.from_text(state.to_text())
        assert parsed.provenance == state.provenance
        assert parsed.steps == state.steps
        for a, b in zip(parsed.generators, state.generators, strict=True):
            assert a.isclose(b, 1e-15)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "text",
        [
            "",
            "1: 1.0*X | provenance: -\n",
            "0: 1.0*X\n",
            "0: 1.0*X | provenance: one:H 0\n",
            "0: 1.0*Q | provenance: -\n",
        ],
    )
    def test_malformed_dumps(self, text):
        """Test that malformed dumps raise ParseError."""
        with pytest.raises(ParseError):
            FactoredState.from_text(text)

    @pytest.mark.unit
    def test_dump_with_repeated_generators_is_rejected(self):
        """Test that a dump whose factors multiply out to trace 2 is refused."""
        text = "0: 1.0*ZI | provenance: -\n1: 1.0*ZI | provenance: -\n"
        with pytest.raises(InvalidGeneratorsError, match="not independent"):
            FactoredState.from_text(text)


@pytest.mark.unit
class TestInvariants:
    """Test suite for properties every evolved state keeps."""

    @pytest.mark.unit
    def test_generators_keep_commuting(self, rng):
        """Test pairwise commutation against the dense oracle after each step."""
        circuit = random_circuit(3, 15, rng)
        state = init_plus(3)
        for gate in circuit:
            state = evolve(state, gate)
            dense = [to_dense(g) for g in state.generators]
            for i in range(3):
                for j in range(i + 1, 3):
                    commutator = dense[i] @ dense[j] - dense[j] @ dense[i]
                    assert np.max(np.abs(commutator)) <= 1e-12

    @pytest.mark.unit
    def test_expand_is_order_independent(self, rng):
        """Test that permuting the factors leaves the expanded state unchanged."""
        state = evolve_circuit(init_plus(3), random_circuit(3, 20, rng))
        permuted = FactoredState(3, tuple(reversed(state.generators)))
        assert expand(permuted).isclose(expand(state), 1e-12)

    @pytest.mark.unit
    def test_evolved_state_is_a_pure_projector(self, rng):
        """Test rho^2 == rho and Tr rho == 1 after a random circuit."""
        rho = to_dense(expand(evolve_circuit(init_plus(3), random_circuit(3, 20, rng))))
        assert np.allclose(rho @ rho, rho, atol=1e-10)
        assert np.trace(rho) == pytest.approx(1.0)
