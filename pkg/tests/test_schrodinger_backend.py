"""Unit tests for the state-vector backend and the circuit format."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.exceptions import (
    DenseCapError,
    DimensionMismatchError,
    ParseError,
    SupportError,
)
from app.quantum.pauli_algebra import PauliString, PauliSum, to_dense
from app.quantum.schrodinger_backend import (
    Circuit,
    GateKind,
    GateOp,
    StateVector,
    apply_gate,
    apply_pauli,
    basis_state,
    bell_state,
    circuit_unitary,
    equal_up_to_global_phase,
    expectation,
    gate_unitary,
    product_state,
    random_circuit,
    reduced_density_matrix,
    run_circuit,
)

hermitian_terms = st.dictionaries(
    st.text(alphabet="IXYZ", min_size=3, max_size=3),
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    min_size=1,
    max_size=6,
)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.mark.unit
class TestGateOp:
    """Test suite for gate values."""

    @pytest.mark.unit
    def test_arity_is_enforced(self):
        """Test that the support length must match the gate arity."""
        with pytest.raises(SupportError):
            GateOp(GateKind.CZ, (0,))
        with pytest.raises(SupportError):
            GateOp(GateKind.H, (0, 1))

    @pytest.mark.unit
    def test_repeated_or_negative_qubits_are_rejected(self):
        """Test support validation."""
        with pytest.raises(SupportError):
            GateOp.cz(1, 1)
        with pytest.raises(SupportError):
            GateOp.h(-1)

    @pytest.mark.unit
    def test_phase_angle_rules(self):
        """Test that only PHASE carries a finite angle."""
        with pytest.raises(ValueError, match="finite angle"):
            GateOp(GateKind.PHASE, (0,))
        with pytest.raises(ValueError, match="finite angle"):
            GateOp.phase(0, math.inf)
        with pytest.raises(ValueError, match="takes no angle"):
            GateOp(GateKind.H, (0,), 1.0)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "gate",
        [GateOp.h(0), GateOp.s(0), GateOp.phase(0, 0.7), GateOp.cx(0, 1), GateOp.cz(1, 0)],
    )
    def test_inverse_undoes_the_gate(self, gate):
        """Test that g followed by g.inverse() is the identity."""
        circuit = Circuit(2, (gate, gate.inverse()))
        assert np.allclose(circuit_unitary(circuit), np.eye(4))

    @pytest.mark.unit
    def test_from_string(self):
        """Test parsing of single gate lines."""
        assert GateOp.from_string("cnot 0 1") == GateOp.cx(0, 1)
        assert GateOp.from_string("PHASE 2 0.5") == GateOp.phase(2, 0.5)
        assert str(GateOp.phase(0, 0.25)) == "PHASE 0 0.25"

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "line", ["", "FOO 0", "H", "CZ 0", "PHASE 0", "H x", "PHASE 0 nan"]
    )
    def test_from_string_rejects_malformed_lines(self, line):
        """Test that malformed gate lines raise ParseError."""
        with pytest.raises(ParseError):
            GateOp.from_string(line)


@pytest.mark.unit
class TestCircuitText:
    """Test suite for the circuit text format."""

    @pytest.mark.unit
    def test_parse_with_header_and_comments(self):
        """Test header, comment and blank-line handling."""
        text = "# bell pair\nQUBITS 2\n\nH 0   # superpose\nCX 0 1\n"
        circuit = Circuit.from_text(text)
        assert circuit.n == 2
        assert circuit.gates == (GateOp.h(0), GateOp.cx(0, 1))

    @pytest.mark.unit
    def test_register_size_from_indices_or_argument(self):
        """Test the size fallbacks without a header."""
        assert Circuit.from_text("H 2").n == 3
        assert Circuit.from_text("H 0", n=4).n == 4

    @pytest.mark.unit
    def test_parse_error_names_the_line(self):
        """Test that ParseError carries the failing line number."""
        with pytest.raises(ParseError) as excinfo:
            Circuit.from_text("QUBITS 2\nH 0\nCZ 0 7\nBOGUS\n")
        assert excinfo.value.line_number == 4

        with pytest.raises(ParseError) as excinfo:
            Circuit.from_text("H 0\nBOGUS 1\n")
        assert excinfo.value.line_number == 2

    @pytest.mark.unit
    def test_oversized_gate_names_the_line(self):
        """Test that a gate outside the declared register reports its line."""
        with pytest.raises(ParseError, match="does not fit 2 qubit") as excinfo:
            Circuit.from_text("QUBITS 2\nH 0\n\nCZ 0 7  # wide\n")
        assert excinfo.value.line_number == 4
        assert excinfo.value.line == "CZ 0 7  # wide"

    @pytest.mark.unit
    def test_header_must_agree_with_argument(self):
        """Test that a conflicting header is rejected."""
        with pytest.raises(ParseError):
            Circuit.from_text("QUBITS 2\nH 0\n", n=3)
        with pytest.raises(ParseError):
            Circuit.from_text("QUBITS zero\n")

    @pytest.mark.unit
    def test_to_text_parses_back(self):
        """Test that a printed circuit parses to the same gates."""
        circuit = Circuit(3, (GateOp.h(0), GateOp.phase(1, -0.3), GateOp.cz(0, 2)))
        assert Circuit.from_text(circuit.to_text()) == circuit

    @pytest.mark.unit
    def test_gates_must_fit(self):
        """Test that gates outside the register are rejected."""
        with pytest.raises(SupportError):
            Circuit(2, (GateOp.h(2),))
        with pytest.raises(SupportError):
            Circuit(2).then(GateOp.cz(0, 5))


@pytest.mark.unit
class TestStates:
    """Test suite for state construction."""

    @pytest.mark.unit
    def test_normalization_and_dimension_are_checked(self):
        """Test StateVector validation."""
        with pytest.raises(ValueError, match="normalized"):
            StateVector(1, [1, 1])
        with pytest.raises(DimensionMismatchError):
            StateVector(2, [1, 0])

    @pytest.mark.unit
    def test_amplitudes_are_read_only(self):
        """Test that a state cannot be mutated in place."""
        state = basis_state(2)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0

    @pytest.mark.unit
    def test_product_state_labels(self):
        """Test the 0 1 + - labels."""
        assert np.allclose(product_state("1").amplitudes, [0, 1])
        assert np.allclose(product_state("-").amplitudes, np.array([1, -1]) / math.sqrt(2))
        assert np.allclose(product_state("10").amplitudes, [0, 0, 1, 0])
        with pytest.raises(ParseError):
            product_state("0a")

    @pytest.mark.unit
    def test_bell_state_and_global_phase(self):
        """Test equality up to a global phase."""
        bell = bell_state(0.0)
        rotated = StateVector(2, 1j * bell.amplitudes)
        assert equal_up_to_global_phase(bell, rotated)
        assert not bell.equivalent(bell_state(math.pi))


@pytest.mark.unit
class TestEvolution:
    """Test suite for gate application and expectation values."""

    @pytest.mark.unit
    def test_bell_preparation(self):
        """Test H then CX on |00> gives the Bell state."""
        circuit = Circuit(2, (GateOp.h(0), GateOp.cx(0, 1)))
        assert run_circuit(circuit, basis_state(2)).equivalent(bell_state(0.0))

    @pytest.mark.unit
    def test_cx_control_is_first_support_entry(self):
        """Test that CX 1 0 flips qubit 0 when qubit 1 is set."""
        state = apply_gate(basis_state(2, 0b01), GateOp.cx(1, 0))
        assert np.allclose(state.amplitudes, basis_state(2, 0b11).amplitudes)

    @pytest.mark.unit
    def test_phase_gate_convention(self):
        """Test PHASE(phi) = diag(1, e^{i phi})."""
        state = apply_gate(product_state("+"), GateOp.phase(0, math.pi / 3))
        expected = np.array([1, np.exp(1j * math.pi / 3)]) / math.sqrt(2)
        assert np.allclose(state.amplitudes, expected)

    @pytest.mark.unit
    def test_gate_must_fit_state(self):
        """Test that applying an out-of-range gate fails."""
        with pytest.raises(SupportError):
            apply_gate(basis_state(1), GateOp.cz(0, 1))
        with pytest.raises(DimensionMismatchError):
            run_circuit(Circuit(3), basis_state(2))

    @pytest.mark.unit
    def test_gate_unitary_matches_kron_embedding(self):
        """Test the dense embedding of a one-qubit gate on qubit 1 of 3."""
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        expected = np.kron(np.kron(np.eye(2), h), np.eye(2))
        assert np.allclose(gate_unitary(GateOp.h(1), 3), expected)

    @pytest.mark.unit
    def test_circuit_unitary_respects_dense_cap(self):
        """Test that the dense unitary refuses large registers."""
        with pytest.raises(DenseCapError):
            circuit_unitary(Circuit(11))

    @pytest.mark.unit
    def test_expectation_matches_dense_oracle(self, rng):
        """Test term-by-term expectation against <psi|O|psi>."""
        circuit = random_circuit(3, 15, rng)
        state = run_circuit(circuit, product_state("+0-"))
        obs = PauliSum.from_string("0.5*XZY - 1.5*IZI + 0.25*YYX + 2*III")
        dense = np.vdot(state.amplitudes, to_dense(obs) @ state.amplitudes)
        assert expectation(state, obs) == pytest.approx(complex(dense), abs=1e-12)

    @pytest.mark.unit
    def test_apply_pauli_matches_dense_oracle(self):
        """Test bit-mask Pauli application including Y phases."""
        state = product_state("+0")
        string = PauliString("YX", 3)
        expected = to_dense(string) @ state.amplitudes
        assert np.allclose(apply_pauli(state, string), expected)

    @pytest.mark.unit
    def test_expectation_rejects_wrong_register(self):
        """Test the dimension check."""
        with pytest.raises(DimensionMismatchError):
            expectation(basis_state(2), PauliSum.from_string("Z"))

    @pytest.mark.unit
    def test_reduced_density_matrix_of_bell_pair(self):
        """Test that each half of a Bell pair is maximally mixed."""
        rho = reduced_density_matrix(bell_state(0.7), [1])
        assert np.allclose(rho, np.eye(2) / 2)
        with pytest.raises(SupportError):
            reduced_density_matrix(bell_state(0.0), [])
        with pytest.raises(SupportError):
            reduced_density_matrix(bell_state(0.0), [2])

    @pytest.mark.unit
    def test_random_circuit_is_reproducible(self):
        """Test that the same seed draws the same circuit."""
        first = random_circuit(4, 20, np.random.default_rng(7))
        second = random_circuit(4, 20, np.random.default_rng(7))
        assert first == second
        assert len(first) == 20

    @pytest.mark.unit
    def test_random_circuit_on_one_qubit_skips_two_qubit_gates(self, rng):
        """Test that a single qubit only receives one-qubit gates."""
        circuit = random_circuit(1, 30, rng)
        assert all(g.kind.arity == 1 for g in circuit)


@pytest.mark.unit
@pytest.mark.property
class TestNumericalInvariants:
    """Properties every evolved state keeps."""

    @pytest.mark.unit
    def test_norm_drift_over_a_thousand_gates(self, rng):
        """Test drift of at most 1e-12 per gate and 1e-9 after 1000 gates."""
        state = product_state("+0-1")
        previous = 1.0
        for gate in random_circuit(4, 1000, rng):
            state = apply_gate(state, gate)
            norm = float(np.linalg.norm(state.amplitudes))
            assert abs(norm - previous) <= 1e-12
            previous = norm
        assert abs(previous - 1.0) <= 1e-9

    @given(terms=hermitian_terms, seed=seeds)
    @settings(max_examples=50, deadline=None)
    def test_hermitian_expectation_is_real(self, terms, seed):
        """Test that real-coefficient observables have real expectations."""
        circuit = random_circuit(3, 12, np.random.default_rng(seed))
        state = run_circuit(circuit, product_state("+0-"))
        value = expectation(state, PauliSum(3, terms))
        assert abs(value.imag) <= 1e-12

    @given(seed=seeds)
    @settings(max_examples=30, deadline=None)
    def test_reduced_states_are_density_matrices(self, seed):
        """Test that every one-qubit reduction is Hermitian, PSD and of unit trace."""
        rng = np.random.default_rng(seed)
        state = run_circuit(random_circuit(3, 15, rng), basis_state(3))
        for qubit in range(3):
            rho = reduced_density_matrix(state, [qubit])
            assert np.allclose(rho, rho.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(rho).min() >= -1e-12
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.unit
    def test_pi_phase_is_z_up_to_global_phase(self):
        """Test PHASE(pi) against Z as unitaries and on a superposition."""
        phase, z = gate_unitary(GateOp.phase(0, math.pi), 1), gate_unitary(GateOp.z(0), 1)
        assert abs(np.trace(phase.conj().T @ z)) / 2 == pytest.approx(1.0, abs=1e-12)
        state = product_state("+")
        kicked = apply_gate(state, GateOp.phase(0, math.pi))
        assert kicked.equivalent(apply_gate(state, GateOp.z(0)))


@pytest.mark.unit
class TestWorkedExamples:
    """Small states whose amplitudes are known in closed form."""

    @pytest.mark.unit
    def test_cz_on_plus_plus(self):
        """Test CZ|++> = (|0+> + |1->)/sqrt2, stabilized by XZ and ZX."""
        state = run_circuit(Circuit(2, (GateOp.cz(0, 1),)), product_state("++"))
        assert np.allclose(state.amplitudes, np.array([1, 1, 1, -1]) / 2)
        for word in ("XZ", "ZX", "YY"):
            value = expectation(state, PauliSum.from_string(word))
            assert value == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.unit
    def test_pi_kick_on_bell_pair(self):
        """Test that PHASE(pi) on qubit 0 turns |00> + |11> into |00> - |11>."""
        kicked = apply_gate(bell_state(0.0), GateOp.phase(0, math.pi))
        assert np.allclose(kicked.amplitudes, np.array([1, 0, 0, -1]) / math.sqrt(2))
        assert kicked.equivalent(bell_state(math.pi))

    @pytest.mark.unit
    def test_reduced_state_of_zero_plus(self):
        """Test that keeping qubit 1 of |0+> leaves |+><+|."""
        rho = reduced_density_matrix(product_state("0+"), [1])
        assert np.allclose(rho, np.full((2, 2), 0.5))
        assert np.linalg.eigvalsh(rho) == pytest.approx([0.0, 1.0], abs=1e-12)
        assert np.trace(rho).real == pytest.approx(1.0)
