"""Classical post-processing: reconciliation, coset keys, privacy amplification.

Reconciliation masks Alice's kept bits with a random C1 codeword: she
declares x XOR v, Bob strips his noisy copy against the declaration and
decodes the residue to the nearest codeword, recovering v whenever the
channel introduced at most t errors in the chunk. The shared key is the
label of v's coset of C2 inside C1, so an observer without C2 learns
nothing usable from the declaration.

Privacy amplification compresses the agreed key through a randomly seeded
Toeplitz matrix (a two-universal family); the collision-entropy helpers
quantify what that buys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .binlin import (
    BitMatrix,
    BitVector,
    DimensionError,
    concat,
    coset_representatives as _matrix_cosets,
    enumerate_row_space,
    rank,
    xor,
)
from .codes import CssCode, LinearCode


class DecodeFailure(Exception):
    """Nearest-codeword decoding hit a tie beyond the correction radius."""


@dataclass(frozen=True)
class ReconciliationBlock:
    """One chunk's worth of reconciliation data."""

    x: BitVector
    y: BitVector
    v: BitVector
    declared: BitVector
    recovered_v: Optional[BitVector]


@dataclass(frozen=True)
class HashSeed:
    """Seed bits defining a Toeplitz map from L input bits to m output bits."""

    bits: BitVector

    @classmethod
    def random(cls, input_length: int, output_length: int,
               rng: np.random.Generator) -> "HashSeed":
        need = input_length + output_length - 1
        if need < 0:
            raise ValueError("seed length would be negative")
        return cls(bits=BitVector(rng.integers(0, 2, size=need)))


class Distribution:
    """A finite probability distribution over abstract outcomes."""

    def __init__(self, probabilities: Sequence[float]):
        probs = np.asarray(probabilities, dtype=np.float64)
        if probs.size == 0:
            raise ValueError("distribution needs at least one outcome")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {float(probs.sum())}, not 1")
        self.probabilities = probs
        self.probabilities.flags.writeable = False

    @classmethod
    def uniform(cls, num_outcomes: int) -> "Distribution":
        return cls([1.0 / num_outcomes] * num_outcomes)


def alice_declare(x: BitVector, code: LinearCode,
                  rng: np.random.Generator) -> tuple[BitVector, BitVector]:
    """Pick a uniform random codeword v and declare x XOR v."""
    if len(x) != code.n:
        raise DimensionError(f"x has length {len(x)}, code length is {code.n}")
    v = code.codewords()[int(rng.integers(0, 1 << code.k))]
    return v, xor(x, v)


def nearest_codeword(word: BitVector, code: LinearCode) -> tuple[BitVector, int]:
    """Exhaustive minimum-distance decoding.

    Raises DecodeFailure when two codewords tie at the minimum distance;
    a tie can only happen beyond the correction radius t.
    """
    best: Optional[BitVector] = None
    best_dist = len(word) + 1
    tie = False
    for cw in code.codewords():
        dist = xor(word, cw).weight
        if dist < best_dist:
            best, best_dist, tie = cw, dist, False
        elif dist == best_dist:
            tie = True
    if tie:
        raise DecodeFailure(f"distance tie at {best_dist}; beyond unique decoding")
    assert best is not None
    return best, best_dist


def bob_recover(y: BitVector, declared: BitVector, code: LinearCode) -> BitVector:
    """Strip the declaration and decode the residue back to Alice's codeword."""
    if len(y) != len(declared) or len(y) != code.n:
        raise DimensionError("y and declared must both have the code's length")
    noisy_v = xor(y, declared)
    codeword, _ = nearest_codeword(noisy_v, code)
    return codeword


@lru_cache(maxsize=8)
def _coset_label_map(g1: BitMatrix, g2: BitMatrix) -> dict:
    reps = _matrix_cosets(g1, g2)
    sub = enumerate_row_space(g2)
    width = rank(g1) - rank(g2)
    mapping = {}
    for idx, rep in enumerate(reps):
        label = BitVector.from_int(idx, width)
        for w in sub:
            mapping[xor(rep, w)] = label
    return mapping


def coset_key(v: BitVector, c1: LinearCode, c2: LinearCode) -> BitVector:
    """Label of the coset of C2 inside C1 that contains v.

    Labels follow the canonical representative ordering, so both parties
    compute identical keys from identical codewords.
    """
    mapping = _coset_label_map(c1.G, c2.G)
    if v not in mapping:
        raise ValueError(f"{v!r} is not a codeword of C1")
    return mapping[v]


def privacy_amplify(w: BitVector, seed: HashSeed, m: int) -> BitVector:
    """Compress w to m bits with the Toeplitz matrix defined by the seed."""
    length = len(w)
    if len(seed.bits) != length + m - 1:
        raise DimensionError(
            f"seed length {len(seed.bits)} does not fit ({length}, {m})")
    if m == 0:
        return BitVector([])
    rows = np.arange(m)[:, None]
    cols = (length - 1) - np.arange(length)[None, :]
    toeplitz = seed.bits.bits[rows + cols]
    return BitVector((toeplitz @ w.bits) & 1)


def collision_entropy(dist: Distribution) -> float:
    """Renyi order-2 entropy: -log2(sum of squared probabilities)."""
    return -math.log2(float(np.sum(dist.probabilities ** 2)))


def pa_bound(m: int, d: float) -> float:
    """Collision-entropy floor of an m-bit hashed key given source entropy d."""
    return m - 2.0 ** (m - d)


def leak_adjusted_bound(hc: float, shannon_leak: float) -> float:
    """Weak bound after a public message leaks `shannon_leak` bits."""
    if shannon_leak < 0:
        raise ValueError("leak must be nonnegative")
    return hc - shannon_leak


@dataclass
class KeyAgreementResult:
    """Outcome of reconciling two kept strings chunk by chunk."""

    blocks: list[ReconciliationBlock]
    alice_key: BitVector
    bob_key: Optional[BitVector]
    decode_failures: int

    @property
    def keys_agree(self) -> bool:
        return self.bob_key is not None and self.bob_key == self.alice_key


def reconcile_keys(kept_alice: BitVector, kept_bob: BitVector, css: CssCode,
                   rng: np.random.Generator) -> KeyAgreementResult:
    """Run mask-declare-recover over consecutive chunks of the kept bits.

    The strings are split into length-n chunks; a trailing remainder
    shorter than n is discarded. Each chunk contributes k coset-label bits
    to the key.
    """
    if len(kept_alice) != len(kept_bob):
        raise DimensionError("kept strings must have equal length")
    n = css.n
    blocks: list[ReconciliationBlock] = []
    alice_labels: list[BitVector] = []
    bob_labels: list[BitVector] = []
    failures = 0
    for start in range(0, len(kept_alice) - n + 1, n):
        x = kept_alice[start:start + n]
        y = kept_bob[start:start + n]
        v, declared = alice_declare(x, css.C1, rng)
        try:
            recovered = bob_recover(y, declared, css.C1)
        except DecodeFailure:
            recovered = None
            failures += 1
        blocks.append(ReconciliationBlock(x=x, y=y, v=v, declared=declared,
                                          recovered_v=recovered))
        alice_labels.append(coset_key(v, css.C1, css.C2))
        if recovered is not None:
            bob_labels.append(coset_key(recovered, css.C1, css.C2))
    alice_key = concat(alice_labels)
    bob_key = concat(bob_labels) if failures == 0 else None
    return KeyAgreementResult(blocks=blocks, alice_key=alice_key,
                              bob_key=bob_key, decode_failures=failures)


def amplify_agreed_key(result: KeyAgreementResult, margin: int,
                       rng: np.random.Generator) -> Optional[dict]:
    """Hash the agreed key down by `margin` bits; None when nothing agreed.

    Returns a record with the public hash seed and both final keys.
    """
    if not result.keys_agree or len(result.alice_key) == 0:
        return None
    key_length = len(result.alice_key)
    m = max(key_length - margin, 0)
    seed = HashSeed.random(key_length, m, rng)
    return {
        "hash_seed": str(seed.bits),
        "m": m,
        "alice_final": str(privacy_amplify(result.alice_key, seed, m)),
        "bob_final": str(privacy_amplify(result.bob_key, seed, m)),
    }
