import itertools
import math

import numpy as np
import pytest

from qsdc_css.binlin import BitVector, xor
from qsdc_css.codes import hamming_7_4
from qsdc_css.qsim import (
    PAULI_BY_NAME,
    Gate,
    apply_single,
    fidelity,
)
from qsdc_css.steane import (
    STABILIZER_SUPPORTS,
    LogicalBlock,
    Syndrome,
    correct,
    decode_measure,
    encode_logical,
    extract_syndrome,
    hamming_correct,
    in_codespace,
    stabilizer_expectation,
)

PAULI_NAMES = ("X", "Z", "Y")


def inject(block, name, qubit):
    return LogicalBlock(apply_single(block.state, PAULI_BY_NAME[name], qubit),
                        block.block_id)


def random_unitary_2x2(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    return Gate(q)


class TestEncodeLogical:
    def test_zero_support(self):
        block = encode_logical(0)
        assert block.state.amplitude("0000000") == pytest.approx(1 / math.sqrt(8))

    def test_one_support(self):
        block = encode_logical(1)
        assert block.state.amplitude("1111111") == pytest.approx(1 / math.sqrt(8))

    def test_disjoint_supports(self):
        assert fidelity(encode_logical(0).state, encode_logical(1).state) == 0.0

    def test_rejects_other_values(self):
        with pytest.raises(ValueError):
            encode_logical(2)

    def test_codespace_membership(self):
        for bit in (0, 1):
            assert in_codespace(encode_logical(bit).state)


class TestExtractSyndrome:
    def test_clean_block_trivial_syndrome(self):
        rng = np.random.default_rng(20)
        syndrome, _ = extract_syndrome(encode_logical(0), rng)
        assert syndrome.is_trivial

    def test_single_x_errors_distinct_z_syndromes(self):
        rng = np.random.default_rng(21)
        seen = set()
        for q in range(7):
            syndrome, _ = extract_syndrome(inject(encode_logical(0), "X", q), rng)
            assert syndrome.x_bits.weight == 0
            assert syndrome.z_bits.weight > 0
            seen.add(str(syndrome.z_bits))
        assert len(seen) == 7

    def test_single_z_errors_flag_x_bits_only(self):
        rng = np.random.default_rng(22)
        for q in range(7):
            syndrome, _ = extract_syndrome(inject(encode_logical(1), "Z", q), rng)
            assert syndrome.x_bits.weight > 0
            assert syndrome.z_bits.weight == 0

    def test_syndrome_injectivity_22_cases(self):
        rng = np.random.default_rng(23)
        signatures = set()
        syndrome, _ = extract_syndrome(encode_logical(0), rng)
        signatures.add((str(syndrome.x_bits), str(syndrome.z_bits)))
        for name, q in itertools.product(PAULI_NAMES, range(7)):
            syndrome, _ = extract_syndrome(inject(encode_logical(0), name, q), rng)
            signatures.add((str(syndrome.x_bits), str(syndrome.z_bits)))
        assert len(signatures) == 22


class TestCorrect:
    def test_zero_syndrome_noop(self):
        block = encode_logical(0)
        trivial = Syndrome(x_bits=BitVector("000"), z_bits=BitVector("000"))
        corrected = correct(block, trivial)
        assert np.array_equal(corrected.state.amplitudes, block.state.amplitudes)

    @pytest.mark.parametrize("bit", (0, 1))
    def test_all_single_pauli_errors_corrected(self, bit):
        rng = np.random.default_rng(24)
        reference = encode_logical(bit)
        for name, q in itertools.product(PAULI_NAMES, range(7)):
            syndrome, block = extract_syndrome(inject(reference, name, q), rng)
            restored = correct(block, syndrome)
            assert fidelity(restored.state, reference.state) >= 1 - 1e-9, (name, q)

    def test_random_single_qubit_unitary_errors(self):
        rng = np.random.default_rng(25)
        for trial in range(100):
            bit = trial % 2
            reference = encode_logical(bit)
            qubit = int(rng.integers(0, 7))
            noisy = LogicalBlock(apply_single(reference.state,
                                              random_unitary_2x2(rng), qubit))
            syndrome, block = extract_syndrome(noisy, rng)
            restored = correct(block, syndrome)
            assert fidelity(restored.state, reference.state) >= 1 - 1e-9

    def test_correction_idempotent(self):
        rng = np.random.default_rng(26)
        syndrome, block = extract_syndrome(inject(encode_logical(0), "X", 3), rng)
        restored = correct(block, syndrome)
        again, restored2 = extract_syndrome(restored, rng)
        assert again.is_trivial
        final = correct(restored2, again)
        assert fidelity(final.state, restored.state) >= 1 - 1e-12


class TestDecodeMeasure:
    def test_logical_zero(self):
        rng = np.random.default_rng(27)
        for _ in range(20):
            assert decode_measure(encode_logical(0), rng) == 0

    def test_logical_one(self):
        rng = np.random.default_rng(28)
        for _ in range(20):
            assert decode_measure(encode_logical(1), rng) == 1

    def test_hamming_correct_single_flips(self):
        code = hamming_7_4()
        for cw in code.codewords():
            assert hamming_correct(cw) == cw
            for pos in range(7):
                flip = BitVector([1 if i == pos else 0 for i in range(7)])
                assert hamming_correct(xor(cw, flip)) == cw


class TestStabilizerAlgebra:
    def test_logical_states_are_plus_one_eigenstates(self):
        for bit in (0, 1):
            state = encode_logical(bit).state
            for kind in ("X", "Z"):
                for support in STABILIZER_SUPPORTS:
                    assert stabilizer_expectation(state, kind, support) == pytest.approx(
                        1.0, abs=1e-9)

    def test_generators_commute_on_random_states(self):
        rng = np.random.default_rng(29)
        amps = rng.normal(size=128) + 1j * rng.normal(size=128)
        amps /= np.linalg.norm(amps)
        from qsdc_css.qsim import StateVector

        state = StateVector(amps)

        def apply_generator(s, kind, support):
            for q in range(7):
                if support[q]:
                    s = apply_single(s, PAULI_BY_NAME[kind], q)
            return s

        generators = [(kind, sup) for kind in ("X", "Z") for sup in STABILIZER_SUPPORTS]
        for (k1, s1), (k2, s2) in itertools.combinations(generators, 2):
            ab = apply_generator(apply_generator(state, k1, s1), k2, s2)
            ba = apply_generator(apply_generator(state, k2, s2), k1, s1)
            assert np.max(np.abs(ab.amplitudes - ba.amplitudes)) < 1e-12

    def test_block_in_codespace_after_correction(self):
        rng = np.random.default_rng(30)
        syndrome, block = extract_syndrome(inject(encode_logical(1), "Y", 5), rng)
        restored = correct(block, syndrome)
        assert in_codespace(restored.state)
