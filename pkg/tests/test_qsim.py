import math

import numpy as np
import pytest

from qsdc_css.binlin import BitVector, DimensionError
from qsdc_css.qsim import (
    ALGEBRA_TOL,
    CNOT,
    HADAMARD,
    IDENTITY,
    NORM_TOL,
    PAULI_X,
    PAULI_Z,
    Gate,
    StateVector,
    apply_controlled,
    apply_single,
    apply_to_all,
    basis_state,
    fidelity,
    measure_all,
    measure_qubit,
    rotation_gate,
    uniform_superposition,
)

STEANE_EVEN = [
    "0000000", "0001111", "0110011", "0111100",
    "1010101", "1011010", "1100110", "1101001",
]


def random_state(num_qubits, rng):
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(amps / np.linalg.norm(amps))


class TestGate:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            Gate([[1, 1], [0, 1]])

    def test_cnot_dimension(self):
        assert CNOT.dimension == 4

    def test_constants_unitary(self):
        for g in (IDENTITY, PAULI_X, PAULI_Z, HADAMARD):
            prod = g.matrix @ g.matrix.conj().T
            assert np.allclose(prod, np.eye(2), atol=ALGEBRA_TOL)


class TestBasisState:
    def test_zero(self):
        s = basis_state("0")
        assert np.allclose(s.amplitudes, [1, 0])

    def test_index_placement(self):
        s = basis_state("11")
        assert s.amplitudes[3] == 1.0
        assert np.count_nonzero(s.amplitudes) == 1

    def test_norm_one(self):
        assert basis_state("10110").norm() == pytest.approx(1.0, abs=NORM_TOL)


class TestUniformSuperposition:
    def test_single_string_is_basis_state(self):
        s = uniform_superposition(["101"])
        assert fidelity(s, basis_state("101")) == pytest.approx(1.0)

    def test_steane_support(self):
        s = uniform_superposition(STEANE_EVEN)
        for string in STEANE_EVEN:
            assert s.amplitude(string) == pytest.approx(1 / math.sqrt(8))
        assert np.count_nonzero(s.amplitudes) == 8

    def test_norm_one_any_count(self):
        for strings in (["00"], ["00", "11"], ["00", "01", "10"]):
            assert uniform_superposition(strings).norm() == pytest.approx(1.0)

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            uniform_superposition(["01", "01"])


class TestRotationGate:
    def test_zero_is_identity(self):
        assert np.allclose(rotation_gate(0.0).matrix, np.eye(2))

    def test_quarter_turn(self):
        g = rotation_gate(math.pi / 2)
        assert np.allclose(g.matrix, [[0, -1], [1, 0]], atol=ALGEBRA_TOL)
        out = apply_single(basis_state("0"), g, 0)
        assert fidelity(out, basis_state("1")) == pytest.approx(1.0)

    def test_inverse(self):
        theta = 0.9182
        prod = rotation_gate(theta).matrix @ rotation_gate(-theta).matrix
        assert np.allclose(prod, np.eye(2), atol=ALGEBRA_TOL)


class TestApplySingle:
    def test_identity_noop(self):
        rng = np.random.default_rng(6)
        s = random_state(3, rng)
        out = apply_single(s, IDENTITY, 1)
        assert np.allclose(out.amplitudes, s.amplitudes)

    def test_x_on_msb(self):
        out = apply_single(basis_state("00"), PAULI_X, 0)
        assert fidelity(out, basis_state("10")) == pytest.approx(1.0)

    def test_rotation_round_trip_on_logical_zero(self):
        s = uniform_superposition(STEANE_EVEN)
        theta = 1.234
        rotated = apply_to_all(s, rotation_gate(theta))
        back = apply_to_all(rotated, rotation_gate(-theta))
        assert fidelity(back, s) >= 1 - 1e-10

    def test_norm_preserved(self):
        rng = np.random.default_rng(7)
        s = random_state(4, rng)
        for q in range(4):
            s = apply_single(s, HADAMARD, q)
            assert abs(s.norm() - 1.0) < 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            apply_single(basis_state("00"), PAULI_X, 2)

    def test_disjoint_qubits_commute_exactly(self):
        rng = np.random.default_rng(8)
        s = random_state(4, rng)
        a = apply_single(apply_single(s, HADAMARD, 0), PAULI_X, 3)
        b = apply_single(apply_single(s, PAULI_X, 3), HADAMARD, 0)
        assert np.array_equal(a.amplitudes, b.amplitudes)


class TestApplyControlled:
    def test_cnot_fires(self):
        out = apply_controlled(basis_state("10"), PAULI_X, control=0, target=1)
        assert fidelity(out, basis_state("11")) == pytest.approx(1.0)

    def test_cnot_idle(self):
        out = apply_controlled(basis_state("00"), PAULI_X, control=0, target=1)
        assert fidelity(out, basis_state("00")) == pytest.approx(1.0)

    def test_cz_symmetric(self):
        rng = np.random.default_rng(9)
        s = random_state(3, rng)
        a = apply_controlled(s, PAULI_Z, control=0, target=2)
        b = apply_controlled(s, PAULI_Z, control=2, target=0)
        assert np.allclose(a.amplitudes, b.amplitudes, atol=ALGEBRA_TOL)

    def test_control_equals_target_rejected(self):
        with pytest.raises(IndexError):
            apply_controlled(basis_state("00"), PAULI_X, control=1, target=1)


class TestMeasureQubit:
    def test_deterministic_one(self):
        rng = np.random.default_rng(10)
        outcome, post = measure_qubit(basis_state("1"), 0, rng)
        assert outcome == 1
        assert fidelity(post, basis_state("1")) == pytest.approx(1.0)

    def test_born_frequency(self):
        rng = np.random.default_rng(11)
        plus = uniform_superposition(["0", "1"])
        outcomes = [measure_qubit(plus, 0, rng)[0] for _ in range(10_000)]
        assert abs(np.mean(outcomes) - 0.5) < 0.02

    def test_post_measurement_norm(self):
        rng = np.random.default_rng(12)
        s = random_state(3, rng)
        for q in range(3):
            _, post = measure_qubit(s, q, rng)
            assert abs(post.norm() - 1.0) < NORM_TOL

    def test_collapse_consistency(self):
        rng = np.random.default_rng(13)
        s = random_state(2, rng)
        outcome, post = measure_qubit(s, 0, rng)
        again, _ = measure_qubit(post, 0, rng)
        assert again == outcome

    def test_measure_all_returns_bits(self):
        rng = np.random.default_rng(14)
        bits, post = measure_all(basis_state("1011"), rng)
        assert bits == BitVector("1011")
        assert fidelity(post, basis_state("1011")) == pytest.approx(1.0)


class TestFidelity:
    def test_self(self):
        rng = np.random.default_rng(15)
        s = random_state(3, rng)
        assert fidelity(s, s) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert fidelity(basis_state("0"), basis_state("1")) == 0.0

    def test_unitary_invariance(self):
        rng = np.random.default_rng(16)
        a, b = random_state(3, rng), random_state(3, rng)
        before = fidelity(a, b)
        g = rotation_gate(0.37)
        after = fidelity(apply_to_all(a, g), apply_to_all(b, g))
        assert after == pytest.approx(before, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            fidelity(basis_state("0"), basis_state("00"))


class TestRotationCommutation:
    def test_rotate_all_commutes(self):
        rng = np.random.default_rng(17)
        s = random_state(7, rng)
        for _ in range(5):
            theta, phi = rng.uniform(0, 2 * np.pi, 2)
            a = apply_to_all(apply_to_all(s, rotation_gate(theta)), rotation_gate(phi))
            b = apply_to_all(apply_to_all(s, rotation_gate(phi)), rotation_gate(theta))
            assert np.max(np.abs(a.amplitudes - b.amplitudes)) < ALGEBRA_TOL

    def test_rotate_all_cancellation(self):
        rng = np.random.default_rng(18)
        s = random_state(7, rng)
        theta = rng.uniform(0, 2 * np.pi)
        back = apply_to_all(apply_to_all(s, rotation_gate(theta)), rotation_gate(-theta))
        assert fidelity(back, s) >= 1 - 1e-10


class TestStateVectorValidation:
    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            StateVector([1.0, 1.0])

    def test_non_power_of_two_rejected(self):
        with pytest.raises(DimensionError):
            StateVector([1.0, 0.0, 0.0])

    def test_immutable(self):
        s = basis_state("0")
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0
