import itertools
import math

import numpy as np
import pytest

from qsdc_css.binlin import BitMatrix, BitVector, CodePairError, xor
from qsdc_css.codes import (
    HAMMING_G,
    CodeConstructionError,
    UnsupportedCodeError,
    bounds_record,
    code_rate,
    css_basis_states,
    css_rate_bound,
    gv_bound_k,
    hamming_7_4,
    hamming_dual_7_3,
    make_css,
    make_linear_code,
    steane_css,
    t_error_probability,
)

EVEN_SUPPORT = {
    "0000000", "0001111", "0110011", "0111100",
    "1010101", "1011010", "1100110", "1101001",
}
ODD_SUPPORT = {
    "1111111", "1110000", "1001100", "1000011",
    "0101010", "0100101", "0011001", "0010110",
}


def brute_min_weight(code):
    return min(w.weight for w in code.codewords() if w.weight > 0)


class TestMakeLinearCode:
    def test_hamming_parameters(self):
        code = hamming_7_4()
        assert (code.n, code.k, code.d) == (7, 4, 3)

    def test_trivial_one_bit_code(self):
        code = make_linear_code(BitMatrix([[1]]))
        assert (code.n, code.k, code.d) == (1, 1, 1)

    def test_dual_parameters(self):
        dual = hamming_7_4().dual()
        assert (dual.n, dual.k, dual.d) == (7, 3, 4)
        # Oracle: scan all 8 dual codewords directly.
        assert brute_min_weight(dual) == 4

    def test_rank_deficient_rejected(self):
        with pytest.raises(CodeConstructionError):
            make_linear_code(BitMatrix([[1, 0, 1], [1, 0, 1]]))

    def test_generator_parity_orthogonal(self):
        code = hamming_7_4()
        prod = (code.G.entries @ code.H.entries.T) & 1
        assert not prod.any()

    def test_distance_matches_exhaustive_scan(self):
        rng = np.random.default_rng(4)
        built = 0
        while built < 8:
            g = BitMatrix(rng.integers(0, 2, (3, 6)))
            try:
                code = make_linear_code(g)
            except CodeConstructionError:
                continue
            assert code.d == brute_min_weight(code)
            built += 1

    def test_length_cap(self):
        with pytest.raises(UnsupportedCodeError):
            make_linear_code(BitMatrix.identity(17))


class TestMakeCss:
    def test_steane_parameters(self):
        css = steane_css()
        assert (css.n, css.k, css.d) == (7, 1, 3)
        assert css.t == 1
        assert not css.degenerate

    def test_degenerate_pair_flagged(self):
        c = hamming_7_4()
        css = make_css(c, c)
        assert css.k == 0
        assert css.degenerate

    def test_containment_enforced(self):
        with pytest.raises(CodePairError):
            make_css(hamming_dual_7_3(), hamming_7_4())

    def test_distance_is_min(self):
        css = steane_css()
        assert css.d == min(css.C1.d, css.C2.d)


class TestCssBasisStates:
    def test_steane_cosets_match_expected_strings(self):
        states = css_basis_states(steane_css())
        assert len(states) == 2
        label0, members0 = states[0]
        label1, members1 = states[1]
        assert str(label0) == "0" and str(label1) == "1"
        assert {str(m) for m in members0} == EVEN_SUPPORT
        assert {str(m) for m in members1} == ODD_SUPPORT

    def test_coset_sizes(self):
        css = steane_css()
        for _, members in css_basis_states(css):
            assert len(members) == 1 << css.C2.k

    def test_partition_of_c1(self):
        css = steane_css()
        union = [m for _, members in css_basis_states(css) for m in members]
        assert len(union) == len(set(union)) == 1 << css.C1.k
        assert set(union) == set(css.C1.codewords())


class TestCodeRate:
    def test_steane_rate(self):
        assert code_rate(steane_css()) == 1 / 7

    def test_degenerate_rate_zero(self):
        c = hamming_7_4()
        assert code_rate(make_css(c, c)) == 0.0


def oracle_binom_tail(n, d):
    # Count weight < d vectors by enumeration, not with comb().
    return sum(
        1 for bits in itertools.product((0, 1), repeat=n) if sum(bits) < d
    )


class TestGvBound:
    def test_sum_of_one(self):
        assert gv_bound_k(7, 1) == 7.0

    def test_n7_d3(self):
        assert oracle_binom_tail(7, 3) == 29
        assert gv_bound_k(7, 3) == pytest.approx(7 - math.log2(29), abs=1e-15)

    def test_hamming_meets_bound(self):
        assert hamming_7_4().k >= gv_bound_k(7, 3)

    def test_corpus_meets_bound(self):
        repetition = make_linear_code(BitMatrix([[1, 1, 1]]))
        assert repetition.k >= gv_bound_k(3, 3)
        assert hamming_dual_7_3().k >= gv_bound_k(7, 4)

    def test_d_out_of_range(self):
        with pytest.raises(ValueError):
            gv_bound_k(7, 0)
        with pytest.raises(ValueError):
            gv_bound_k(7, 8)


class TestCssRateBound:
    def test_equal_distances_zero(self):
        assert css_rate_bound(9, 3, 3) == 0.0

    def test_n7_values(self):
        assert oracle_binom_tail(7, 4) == 64
        expected = math.log2(64 / 29) / 7
        assert css_rate_bound(7, 3, 4) == pytest.approx(expected, abs=1e-15)

    def test_antisymmetric(self):
        assert css_rate_bound(7, 3, 4) == pytest.approx(-css_rate_bound(7, 4, 3), abs=1e-15)


class TestTErrorProbability:
    def test_p_zero(self):
        assert t_error_probability(7, 0, 0.0) == 1.0
        assert t_error_probability(7, 1, 0.0) == 0.0

    def test_value(self):
        assert t_error_probability(7, 1, 0.01) == pytest.approx(
            7 * 0.01 * 0.99**6, abs=1e-15)

    def test_monte_carlo_cross_check(self):
        rng = np.random.default_rng(5)
        trials = 200_000
        flips = (rng.random((trials, 7)) < 0.01).sum(axis=1)
        empirical = float(np.mean(flips == 1))
        assert empirical == pytest.approx(t_error_probability(7, 1, 0.01), abs=2e-3)

    def test_sums_to_one(self):
        for p in (0.0, 0.3, 0.77, 1.0):
            total = sum(t_error_probability(9, t, p) for t in range(10))
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_range_checks(self):
        with pytest.raises(ValueError):
            t_error_probability(7, 8, 0.1)
        with pytest.raises(ValueError):
            t_error_probability(7, 1, 1.5)


class TestBoundsRecord:
    def test_fields(self):
        record = bounds_record(7, 3, 4)
        assert set(record) == {"n", "d1", "d2", "rate_bound", "gv_k1", "gv_k2"}
        assert record["gv_k1"] == gv_bound_k(7, 3)
        assert record["gv_k2"] == gv_bound_k(7, 4)
        assert record["rate_bound"] == css_rate_bound(7, 3, 4)
