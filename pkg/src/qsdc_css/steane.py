"""Steane [[7,1,3]] logical layer: encoding, syndromes, correction, readout.

The six stabilizer generators act on the qubit sets {1,3,5,7}, {2,3,6,7}
and {4,5,6,7} (1-indexed), as X-type and Z-type triples. Those sets are
the classical Hamming parity checks, so each 3-bit syndrome half reads
directly as the binary position of the flagged qubit.

Syndromes are extracted through a transient ancilla appended as an 8th
qubit: Hadamard, controlled Paulis onto the generator's support, Hadamard,
measure. Outcome bit b encodes stabilizer eigenvalue (-1)^b.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .binlin import BitVector, mat_vec, xor
from .codes import HAMMING_H, CssCode, css_basis_states, steane_css
from .qsim import (
    HADAMARD,
    PAULI_BY_NAME,
    PAULI_X,
    PAULI_Z,
    StateVector,
    apply_controlled,
    apply_single,
    measure_all,
    measure_qubit,
    uniform_superposition,
)

CODESPACE_TOL = 1e-9

# Generator supports in table order; the same sets serve the X- and Z-type
# triples. Support i contributes 2^i to the flagged qubit's 1-based position.
STABILIZER_SUPPORTS = (
    BitVector("1010101"),
    BitVector("0110011"),
    BitVector("0001111"),
)


@dataclass(frozen=True)
class Syndrome:
    """Six stabilizer outcomes: 3 bits per type, 0 meaning eigenvalue +1."""

    x_bits: BitVector
    z_bits: BitVector

    @property
    def is_trivial(self) -> bool:
        return self.x_bits.weight == 0 and self.z_bits.weight == 0


@dataclass(frozen=True)
class LogicalBlock:
    """One Steane-encoded logical qubit."""

    state: StateVector
    block_id: int = 0


@lru_cache(maxsize=1)
def _code() -> CssCode:
    return steane_css()


@lru_cache(maxsize=1)
def _logical_supports() -> tuple[tuple[BitVector, ...], tuple[BitVector, ...]]:
    states = css_basis_states(_code())
    return tuple(states[0][1]), tuple(states[1][1])


def encode_logical(bit: int, block_id: int = 0) -> LogicalBlock:
    """|0_L> or |1_L>: uniform superposition over the matching coset."""
    if bit not in (0, 1):
        raise ValueError("logical bit must be 0 or 1")
    support = _logical_supports()[bit]
    return LogicalBlock(state=uniform_superposition(support), block_id=block_id)


def _append_ancilla(state: StateVector) -> StateVector:
    return StateVector(np.kron(state.amplitudes, np.array([1.0, 0.0])))


def _drop_ancilla(state: StateVector, outcome: int) -> StateVector:
    column = state.amplitudes.reshape(-1, 2)[:, outcome]
    norm = float(np.sqrt(np.vdot(column, column).real))
    return StateVector(column / norm)


def _measure_generator(state: StateVector, pauli, support: BitVector,
                       rng: np.random.Generator) -> tuple[int, StateVector]:
    anc = state.num_qubits
    work = _append_ancilla(state)
    work = apply_single(work, HADAMARD, anc)
    for qubit in range(len(support)):
        if support[qubit]:
            work = apply_controlled(work, pauli, control=anc, target=qubit)
    work = apply_single(work, HADAMARD, anc)
    outcome, work = measure_qubit(work, anc, rng)
    return outcome, _drop_ancilla(work, outcome)


def extract_syndrome(block: LogicalBlock,
                     rng: np.random.Generator) -> tuple[Syndrome, LogicalBlock]:
    """Measure all six generators via the ancilla circuit.

    Returns the syndrome and the post-measurement block; a -1 eigenvalue
    (bit 1) flags an error.
    """
    state = block.state
    x_bits, z_bits = [], []
    for support in STABILIZER_SUPPORTS:
        bit, state = _measure_generator(state, PAULI_X, support, rng)
        x_bits.append(bit)
    for support in STABILIZER_SUPPORTS:
        bit, state = _measure_generator(state, PAULI_Z, support, rng)
        z_bits.append(bit)
    syndrome = Syndrome(x_bits=BitVector(x_bits), z_bits=BitVector(z_bits))
    return syndrome, LogicalBlock(state=state, block_id=block.block_id)


def _flagged_position(bits: BitVector) -> int:
    """1-based qubit position encoded by a syndrome half; 0 means no error."""
    return bits[0] * 1 + bits[1] * 2 + bits[2] * 4


def correct(block: LogicalBlock, syndrome: Syndrome) -> LogicalBlock:
    """Undo the flagged single-qubit error.

    z_bits locate a bit flip (X applied there); x_bits locate a phase flip
    (Z applied there). Both firing at one position handles a Y error.
    """
    state = block.state
    x_pos = _flagged_position(syndrome.z_bits)
    if x_pos:
        state = apply_single(state, PAULI_X, x_pos - 1)
    z_pos = _flagged_position(syndrome.x_bits)
    if z_pos:
        state = apply_single(state, PAULI_Z, z_pos - 1)
    return LogicalBlock(state=state, block_id=block.block_id)


def decode_measure(block: LogicalBlock, rng: np.random.Generator) -> int:
    """Measure all qubits in Z and decode to the logical bit.

    The measured string is corrected to the nearest Hamming codeword
    (single-bit syndrome decoding), then classified by its coset: even
    coset 0, odd coset 1.
    """
    bits, _ = measure_all(block.state, rng)
    corrected = hamming_correct(bits)
    return 0 if _code().C2.contains(corrected) else 1


_HAMMING_PLACE_VALUES = (4, 2, 1)  # HAMMING_H row order: {4,5,6,7}, {2,3,6,7}, {1,3,5,7}


def hamming_correct(bits: BitVector) -> BitVector:
    """Flip the single position flagged by the Hamming [7,4,3] syndrome."""
    syndrome = mat_vec(HAMMING_H, bits)
    position = sum(pv for pv, s in zip(_HAMMING_PLACE_VALUES, syndrome) if s)
    if position == 0:
        return bits
    flip = [0] * len(bits)
    flip[position - 1] = 1
    return xor(bits, BitVector(flip))


def stabilizer_expectation(state: StateVector, kind: str, support: BitVector) -> float:
    """<psi| S |psi> for the generator of the given type and support."""
    pauli = PAULI_BY_NAME[kind]
    transformed = state
    for qubit in range(len(support)):
        if support[qubit]:
            transformed = apply_single(transformed, pauli, qubit)
    return float(np.vdot(state.amplitudes, transformed.amplitudes).real)


def in_codespace(state: StateVector, tol: float = CODESPACE_TOL) -> bool:
    """True when all six stabilizer expectations are +1 within `tol`."""
    for kind in ("X", "Z"):
        for support in STABILIZER_SUPPORTS:
            if abs(stabilizer_expectation(state, kind, support) - 1.0) > tol:
                return False
    return True
