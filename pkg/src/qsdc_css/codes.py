"""Classical linear codes, CSS code pairs, and rate/distance bounds.

Linear codes are built from a generator matrix; the parity check and the
minimum distance are derived at construction (distance by exhaustive
weight scan, which is why block lengths are capped at 16). A CSS pair is
a validated containment C2 subset-of C1 with parameters
[[n, k1 - k2, min(d1, d2)]].

Bound formulas keep binomial sums in exact integer arithmetic and only
take logarithms at the end.
"""

from __future__ import annotations

import math
from typing import Sequence

from .binlin import (
    BitMatrix,
    BitVector,
    CodePairError,
    coset_representatives as _matrix_cosets,
    enumerate_row_space,
    mat_vec,
    null_space,
    rank,
    xor,
)

MAX_CODE_LENGTH = 16
MAX_BASIS_LENGTH = 10


class CodeConstructionError(ValueError):
    """Generator matrix cannot define a valid code."""


class UnsupportedCodeError(ValueError):
    """Operation exceeds the exhaustive-enumeration regime."""


class LinearCode:
    """An [n, k, d] binary linear code with generator G and parity check H."""

    def __init__(self, n: int, k: int, d: int, G: BitMatrix, H: BitMatrix,
                 codewords: Sequence[BitVector]):
        self.n = n
        self.k = k
        self.d = d
        self.G = G
        self.H = H
        self._codewords = tuple(codewords)
        self._codeword_set = frozenset(codewords)

    def codewords(self) -> tuple[BitVector, ...]:
        """All 2^k codewords, in message order."""
        return self._codewords

    def contains(self, v: BitVector) -> bool:
        return mat_vec(self.H, v).weight == 0 if self.H.rows else len(v) == self.n

    def dual(self) -> "LinearCode":
        """The [n, n-k] dual code, generated by the parity check."""
        return make_linear_code(self.H)

    def __repr__(self) -> str:
        return f"LinearCode[{self.n},{self.k},{self.d}]"


def make_linear_code(G: BitMatrix) -> LinearCode:
    """Build a LinearCode from a full-row-rank generator matrix."""
    n = G.cols
    if n > MAX_CODE_LENGTH:
        raise UnsupportedCodeError(
            f"block length {n} exceeds the exhaustive regime ({MAX_CODE_LENGTH})")
    k = G.rows
    if rank(G) != k:
        raise CodeConstructionError("generator matrix is rank-deficient")
    H = null_space(G)
    words = enumerate_row_space(G)
    weights = [w.weight for w in words if w.weight > 0]
    d = min(weights) if weights else n
    return LinearCode(n=n, k=k, d=d, G=G, H=H, codewords=words)


class CssCode:
    """A CSS pair: C2 contained in C1, parameters [[n, k1-k2, min(d1,d2)]]."""

    def __init__(self, C1: LinearCode, C2: LinearCode, degenerate: bool):
        self.C1 = C1
        self.C2 = C2
        self.n = C1.n
        self.k = C1.k - C2.k
        self.d = min(C1.d, C2.d)
        self.degenerate = degenerate

    @property
    def t(self) -> int:
        """Number of correctable errors, floor((d-1)/2)."""
        return (self.d - 1) // 2

    def coset_representatives(self) -> list[BitVector]:
        return _matrix_cosets(self.C1.G, self.C2.G)

    def __repr__(self) -> str:
        return f"CssCode[[{self.n},{self.k},{self.d}]]"


def make_css(C1: LinearCode, C2: LinearCode) -> CssCode:
    """Validate containment and derive the quantum code parameters."""
    if C1.n != C2.n:
        raise CodePairError("codes must share a block length")
    for i in range(C2.G.rows):
        if not C1.contains(C2.G.row(i)):
            raise CodePairError("C2 is not contained in C1")
    return CssCode(C1, C2, degenerate=(C1.k == C2.k))


def css_basis_states(code: CssCode) -> list[tuple[BitVector, list[BitVector]]]:
    """Classical support of each logical basis state.

    One entry per coset of C2 in C1: (label, strings). The label is the
    coset index as a (k1-k2)-bit vector following the canonical
    representative order; the strings are the coset members sorted
    ascending, and their uniform superposition is the basis state.
    """
    if code.n > MAX_BASIS_LENGTH:
        raise UnsupportedCodeError(
            f"basis enumeration supports n <= {MAX_BASIS_LENGTH}, got {code.n}")
    reps = code.coset_representatives()
    sub = code.C2.codewords()
    out = []
    for idx, rep in enumerate(reps):
        label = BitVector.from_int(idx, code.k)
        members = sorted((xor(rep, w) for w in sub), key=BitVector.to_int)
        out.append((label, members))
    return out


def code_rate(code: CssCode) -> float:
    """R = (k1 - k2) / n."""
    return (code.C1.k - code.C2.k) / code.n


def _binom_partial_sum(n: int, d: int) -> int:
    """Exact sum of C(n, i) for i = 0 .. d-1."""
    if d < 1 or d > n:
        raise ValueError(f"d must satisfy 1 <= d <= n, got d={d}, n={n}")
    return sum(math.comb(n, i) for i in range(d))


def gv_bound_k(n: int, d: int) -> float:
    """Gilbert-Varshamov lower bound on the dimension of an [n, k, d] code.

    Returns n - log2(sum_{i<d} C(n, i)).
    """
    return n - math.log2(_binom_partial_sum(n, d))


def css_rate_bound(n: int, d1: int, d2: int) -> float:
    """Lower bound on the rate of a CSS code with component distances d1, d2.

    (1/n) * log2 of the ratio of the two GV binomial sums.
    """
    s1 = _binom_partial_sum(n, d1)
    s2 = _binom_partial_sum(n, d2)
    return (math.log2(s2) - math.log2(s1)) / n


def t_error_probability(n: int, t: int, p: float) -> float:
    """Probability of exactly t errors among n iid qubits at rate p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not 0 <= t <= n:
        raise ValueError(f"t must satisfy 0 <= t <= n, got t={t}, n={n}")
    return math.comb(n, t) * p**t * (1.0 - p) ** (n - t)


def bounds_record(n: int, d1: int, d2: int) -> dict:
    """One JSON-ready bound report record for an (n, d1, d2) query."""
    return {
        "n": n,
        "d1": d1,
        "d2": d2,
        "rate_bound": css_rate_bound(n, d1, d2),
        "gv_k1": gv_bound_k(n, d1),
        "gv_k2": gv_bound_k(n, d2),
    }


# Steane [[7,1,3]] building blocks. The parity-check rows are the binary
# representations of the column positions 1..7 (MSB-first), which makes the
# dual code's codewords exactly the even-weight support strings of the
# logical zero state.
HAMMING_G = BitMatrix([
    [1, 0, 0, 0, 0, 1, 1],
    [0, 1, 0, 0, 1, 0, 1],
    [0, 0, 1, 0, 1, 1, 0],
    [0, 0, 0, 1, 1, 1, 1],
])

HAMMING_H = BitMatrix([
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
])


def hamming_7_4() -> LinearCode:
    """The [7,4,3] Hamming code."""
    return make_linear_code(HAMMING_G)


def hamming_dual_7_3() -> LinearCode:
    """The [7,3,4] dual of the Hamming code (rows of the parity check)."""
    return make_linear_code(HAMMING_H)


def steane_css() -> CssCode:
    """The Steane [[7,1,3]] pair: C1 = Hamming [7,4,3], C2 = its dual."""
    return make_css(hamming_7_4(), hamming_dual_7_3())
