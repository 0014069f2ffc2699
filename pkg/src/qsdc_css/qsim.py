"""Dense pure-state simulator for small qubit registers.

States are complex amplitude vectors over 2^q basis states. Qubit 0 is the
most significant bit of the basis index, matching the MSB-first BitVector
convention, so basis_state("1010101") puts its amplitude at index
0b1010101. Gates return new states; nothing mutates in place.

Tolerances: NORM_TOL guards state normalization, ALGEBRA_TOL guards
algebraic identities such as unitarity.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .binlin import BitVector, DimensionError

NORM_TOL = 1e-10
ALGEBRA_TOL = 1e-12

MAX_QUBITS = 16


class Gate:
    """A unitary on one qubit (dimension 2) or two qubits (dimension 4)."""

    __slots__ = ("matrix", "dimension")

    def __init__(self, matrix) -> None:
        mat = np.asarray(matrix, dtype=np.complex128)
        if mat.shape not in ((2, 2), (4, 4)):
            raise DimensionError(f"gate must be 2x2 or 4x4, got {mat.shape}")
        if not np.allclose(mat @ mat.conj().T, np.eye(mat.shape[0]), atol=ALGEBRA_TOL):
            raise ValueError("gate matrix is not unitary")
        self.matrix = mat
        self.matrix.flags.writeable = False
        self.dimension = mat.shape[0]


IDENTITY = Gate([[1, 0], [0, 1]])
PAULI_X = Gate([[0, 1], [1, 0]])
PAULI_Y = Gate([[0, -1j], [1j, 0]])
PAULI_Z = Gate([[1, 0], [0, -1]])
HADAMARD = Gate(np.array([[1, 1], [1, -1]]) / math.sqrt(2))
CNOT = Gate([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])

PAULI_BY_NAME = {"I": IDENTITY, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


def rotation_gate(theta: float) -> Gate:
    """Real plane rotation ((cos, -sin), (sin, cos)) by theta radians."""
    c, s = math.cos(theta), math.sin(theta)
    return Gate([[c, -s], [s, c]])


class StateVector:
    """Normalized pure state over num_qubits qubits."""

    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes, num_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.shape[0] == 0:
            raise DimensionError("amplitudes must be a nonempty one-dimensional array")
        q = int(amps.shape[0]).bit_length() - 1
        if 1 << q != amps.shape[0]:
            raise DimensionError("amplitude count must be a power of two")
        if num_qubits is not None and num_qubits != q:
            raise DimensionError(f"expected {1 << num_qubits} amplitudes, got {amps.shape[0]}")
        if q > MAX_QUBITS:
            raise DimensionError(f"at most {MAX_QUBITS} qubits supported")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm}")
        self.amplitudes = amps
        self.amplitudes.flags.writeable = False
        self.num_qubits = q

    def amplitude(self, bits: BitVector | str) -> complex:
        """Amplitude of the computational basis state |bits>."""
        if isinstance(bits, str):
            bits = BitVector(bits)
        if len(bits) != self.num_qubits:
            raise DimensionError("bit string length must equal qubit count")
        return complex(self.amplitudes[bits.to_int()])

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def basis_state(bits: BitVector | str) -> StateVector:
    """|bits> with a single unit amplitude."""
    if isinstance(bits, str):
        bits = BitVector(bits)
    amps = np.zeros(1 << len(bits), dtype=np.complex128)
    amps[bits.to_int()] = 1.0
    return StateVector(amps)


def uniform_superposition(strings: Sequence[BitVector | str]) -> StateVector:
    """Equal-amplitude superposition of the listed distinct basis strings."""
    parsed = [BitVector(s) if isinstance(s, str) else s for s in strings]
    if not parsed:
        raise ValueError("at least one basis string required")
    length = len(parsed[0])
    if any(len(s) != length for s in parsed):
        raise DimensionError("all basis strings must share a length")
    indices = [s.to_int() for s in parsed]
    if len(set(indices)) != len(indices):
        raise ValueError("basis strings must be pairwise distinct")
    amps = np.zeros(1 << length, dtype=np.complex128)
    amps[indices] = 1.0 / math.sqrt(len(indices))
    return StateVector(amps)


def _apply_2x2(amps: np.ndarray, mat: np.ndarray, qubit: int, q: int) -> np.ndarray:
    t = amps.reshape((2,) * q)
    t = np.moveaxis(t, qubit, 0).reshape(2, -1)
    out = mat @ t
    return np.moveaxis(out.reshape((2,) + (2,) * (q - 1)), 0, qubit).reshape(-1)


def apply_single(state: StateVector, gate: Gate, qubit: int) -> StateVector:
    """Apply a one-qubit gate at `qubit`, identity elsewhere."""
    if gate.dimension != 2:
        raise DimensionError("apply_single needs a 2x2 gate")
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits} qubits")
    return StateVector(_apply_2x2(state.amplitudes, gate.matrix, qubit, state.num_qubits))


def apply_to_all(state: StateVector, gate: Gate) -> StateVector:
    """Apply the same one-qubit gate to every qubit of the register."""
    if gate.dimension != 2:
        raise DimensionError("apply_to_all needs a 2x2 gate")
    amps = state.amplitudes
    for qubit in range(state.num_qubits):
        amps = _apply_2x2(amps, gate.matrix, qubit, state.num_qubits)
    return StateVector(amps)


def apply_controlled(state: StateVector, gate: Gate, control: int, target: int) -> StateVector:
    """Apply a one-qubit gate on `target` conditioned on `control` being 1."""
    if gate.dimension != 2:
        raise DimensionError("apply_controlled needs a 2x2 target gate")
    q = state.num_qubits
    if control == target:
        raise IndexError("control and target must differ")
    for idx in (control, target):
        if not 0 <= idx < q:
            raise IndexError(f"qubit {idx} out of range for {q} qubits")
    t = state.amplitudes.reshape((2,) * q)
    t = np.moveaxis(t, (control, target), (0, 1)).copy()
    sub = t[1].reshape(2, -1)
    t[1] = (gate.matrix @ sub).reshape(t[1].shape)
    return StateVector(np.moveaxis(t, (0, 1), (control, target)).reshape(-1))


def measure_qubit(state: StateVector, qubit: int,
                  rng: np.random.Generator) -> tuple[int, StateVector]:
    """Z-basis measurement of one qubit: Born-sampled outcome, collapsed state."""
    q = state.num_qubits
    if not 0 <= qubit < q:
        raise IndexError(f"qubit {qubit} out of range for {q} qubits")
    t = state.amplitudes.reshape((2,) * q)
    t = np.moveaxis(t, qubit, 0)
    p1 = min(max(float(np.sum(np.abs(t[1]) ** 2)), 0.0), 1.0)
    outcome = 1 if rng.random() < p1 else 0
    p_outcome = p1 if outcome else 1.0 - p1
    collapsed = np.zeros_like(t)
    collapsed[outcome] = t[outcome] / math.sqrt(p_outcome)
    return outcome, StateVector(np.moveaxis(collapsed, 0, qubit).reshape(-1))


def measure_all(state: StateVector, rng: np.random.Generator) -> tuple[BitVector, StateVector]:
    """Measure every qubit in order; returns the bit string and collapsed state."""
    bits = []
    for qubit in range(state.num_qubits):
        outcome, state = measure_qubit(state, qubit, rng)
        bits.append(outcome)
    return BitVector(bits), state


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    if a.num_qubits != b.num_qubits:
        raise DimensionError("states must have equal qubit counts")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
