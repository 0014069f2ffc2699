"""Exact linear algebra over GF(2).

Bit vectors and dense bit matrices with Gaussian elimination, null spaces
and coset enumeration. Bit order is most-significant-first throughout:
the string "10101" has bit 1 at position 0 (the leftmost character), and
converting to an integer treats position 0 as the high bit. Everything is
immutable after construction and safe to share.

Supported regime is dense matrices with n <= 32 columns; that is all the
desk-scale codes here need.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_DIM = 32


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


class CodePairError(ValueError):
    """A (C1, C2) pair violates the required containment."""


def _coerce_bits(bits: Iterable[int]) -> np.ndarray:
    arr = np.array(list(bits), dtype=np.uint8)
    if arr.ndim != 1:
        raise DimensionError("bit vector must be one-dimensional")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("entries must be 0 or 1")
    return arr


class BitVector:
    """Immutable vector over GF(2)."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | str):
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        self._bits = _coerce_bits(bits)
        self._bits.flags.writeable = False

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls([0] * length)

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        if value < 0 or value >= (1 << length):
            raise ValueError(f"{value} does not fit in {length} bits")
        return cls(format(value, f"0{length}b") if length else [])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def to_int(self) -> int:
        out = 0
        for b in self._bits:
            out = (out << 1) | int(b)
        return out

    @property
    def weight(self) -> int:
        return int(self._bits.sum())

    def __len__(self) -> int:
        return self._bits.shape[0]

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitVector(self._bits[idx])
        return int(self._bits[idx])

    def __iter__(self) -> Iterator[int]:
        return (int(b) for b in self._bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        return xor(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((len(self), self._bits.tobytes()))

    def __str__(self) -> str:
        return "".join(str(int(b)) for b in self._bits)

    def __repr__(self) -> str:
        return f"BitVector('{self}')"


def concat(vectors: Sequence[BitVector]) -> BitVector:
    """Concatenate bit vectors left to right."""
    if not vectors:
        return BitVector([])
    return BitVector(np.concatenate([v.bits for v in vectors]))


class BitMatrix:
    """Immutable dense matrix over GF(2)."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        if isinstance(entries, BitMatrix):
            arr = entries._entries.copy()
        elif isinstance(entries, np.ndarray):
            arr = entries.astype(np.uint8)
        else:
            rows = [r.bits if isinstance(r, BitVector) else r for r in entries]
            arr = np.array(rows, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError("matrix entries must be two-dimensional")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("entries must be 0 or 1")
        if arr.shape[1] > MAX_DIM:
            raise DimensionError(f"at most {MAX_DIM} columns supported")
        self._entries = arr
        self._entries.flags.writeable = False

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    def row(self, i: int) -> BitVector:
        return BitVector(self._entries[i])

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self._entries.T)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(
            np.array_equal(self._entries, other._entries)
        )

    def __hash__(self) -> int:
        return hash((self._entries.shape, self._entries.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join("".join(str(int(b)) for b in r) for r in self._entries)
        return f"BitMatrix([{body}])"


def xor(a: BitVector, b: BitVector) -> BitVector:
    """Elementwise XOR; GF(2) addition and subtraction alike."""
    if len(a) != len(b):
        raise DimensionError(f"length mismatch: {len(a)} vs {len(b)}")
    return BitVector(a.bits ^ b.bits)


def mat_vec(m: BitMatrix, v: BitVector) -> BitVector:
    """Matrix-vector product over GF(2)."""
    if m.cols != len(v):
        raise DimensionError(f"matrix has {m.cols} columns, vector length {len(v)}")
    return BitVector((m.entries @ v.bits) & 1)


def _row_reduce(arr: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form with deterministic leftmost pivots.

    Returns the reduced array and the pivot column list.
    """
    a = arr.copy()
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pivot = None
        for i in range(r, m):
            if a[i, c]:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        for i in range(m):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def row_reduce(m: BitMatrix) -> BitMatrix:
    """Reduced row-echelon form of `m` (zero rows kept)."""
    reduced, _ = _row_reduce(m.entries)
    return BitMatrix(reduced)


def row_canonical(m: BitMatrix) -> BitMatrix:
    """Canonical basis of the row space: RREF with zero rows dropped.

    Two matrices span the same row space iff their canonical forms are equal.
    """
    reduced, pivots = _row_reduce(m.entries)
    return BitMatrix(reduced[: len(pivots)]) if pivots else BitMatrix.zeros(0, m.cols)


def rank(m: BitMatrix) -> int:
    """Row rank over GF(2)."""
    _, pivots = _row_reduce(m.entries)
    return len(pivots)


def null_space(m: BitMatrix) -> BitMatrix:
    """Basis of {v : m @ v = 0}, one vector per row.

    Row count is cols - rank(m); an empty basis comes back as a 0 x cols matrix.
    """
    reduced, pivots = _row_reduce(m.entries)
    n = m.cols
    free_cols = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free_cols), n), dtype=np.uint8)
    for bi, free in enumerate(free_cols):
        basis[bi, free] = 1
        for ri, pc in enumerate(pivots):
            basis[bi, pc] = reduced[ri, free]
    return BitMatrix(basis) if len(free_cols) else BitMatrix.zeros(0, n)


def in_row_space(m: BitMatrix, v: BitVector) -> bool:
    """True when `v` lies in the row space of `m`."""
    if m.cols != len(v):
        raise DimensionError(f"matrix has {m.cols} columns, vector length {len(v)}")
    stacked = BitMatrix(np.vstack([m.entries, v.bits[None, :]]))
    return rank(stacked) == rank(m)


def enumerate_row_space(m: BitMatrix) -> list[BitVector]:
    """All 2^rank vectors of the row space, ordered by message index.

    Message i is the rank-bit MSB-first encoding of i applied to an
    independent subset of rows, so the ordering is reproducible.
    """
    basis = row_canonical(m)
    k = basis.rows
    out = []
    for msg in range(1 << k):
        acc = np.zeros(m.cols, dtype=np.uint8)
        for j in range(k):
            if (msg >> (k - 1 - j)) & 1:
                acc ^= basis.entries[j]
        out.append(BitVector(acc))
    return out


def coset_representatives(g1: BitMatrix, g2: BitMatrix) -> list[BitVector]:
    """Representatives of the cosets of rowspace(g2) inside rowspace(g1).

    Requires rowspace(g2) to be contained in rowspace(g1); returns
    2^(rank g1 - rank g2) representatives in a deterministic order with
    the zero vector first (the subcode's own coset).
    """
    if g1.cols != g2.cols:
        raise DimensionError("generator matrices must share a length")
    for i in range(g2.rows):
        if not in_row_space(g1, g2.row(i)):
            raise CodePairError("second code is not contained in the first")
    sub_words = enumerate_row_space(g2)
    reps: list[BitVector] = []
    seen: set[BitVector] = set()
    for cw in enumerate_row_space(g1):
        if cw in seen:
            continue
        reps.append(cw)
        seen.update(xor(cw, w) for w in sub_words)
    return reps
