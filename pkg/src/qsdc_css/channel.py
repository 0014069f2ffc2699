"""Stochastic channel effects: Pauli noise, block loss, eavesdroppers.

Noise is trajectory-sampled: each qubit independently draws one Kraus
branch per traversal and the sampled Pauli is applied to the pure state.
Every application returns a ground-truth record of what fired; that
record exists for test oracles only and is never handed to protocol
roles.

Loss is heralded at block granularity: both endpoints learn which blocks
survived.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qsim import PAULI_BY_NAME, apply_single, apply_to_all, measure_all, rotation_gate
from .steane import LogicalBlock

NOISE_KINDS = ("none", "bit_flip", "phase_flip", "depolarizing")
EVE_KINDS = ("none", "intercept_resend_z", "rotation_guess")


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit Pauli channel applied once per traversal."""

    kind: str = "none"
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise probability must lie in [0, 1], got {self.p}")

    def branches(self) -> list[tuple[str, float]]:
        """Kraus branch labels and probabilities; probabilities sum to 1."""
        if self.kind == "none":
            return [("I", 1.0)]
        if self.kind == "bit_flip":
            return [("I", 1.0 - self.p), ("X", self.p)]
        if self.kind == "phase_flip":
            return [("I", 1.0 - self.p), ("Z", self.p)]
        return [("I", 1.0 - self.p), ("X", self.p / 3), ("Y", self.p / 3), ("Z", self.p / 3)]


@dataclass(frozen=True)
class LossModel:
    """Probability that a whole block is absorbed per traversal."""

    p_loss: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_loss <= 1.0:
            raise ValueError(f"loss probability must lie in [0, 1], got {self.p_loss}")


@dataclass(frozen=True)
class EveStrategy:
    """Eavesdropper behavior on intercepted blocks.

    rotation_guess uses `guess_angle` when set, otherwise draws a fresh
    uniform angle per block.
    """

    kind: str = "none"
    guess_angle: float | None = None

    def __post_init__(self):
        if self.kind not in EVE_KINDS:
            raise ValueError(f"unknown eve strategy {self.kind!r}")


def _sample_pauli(model: NoiseModel, rng: np.random.Generator) -> str:
    if model.kind == "none":
        return "I"
    r = rng.random()
    if model.kind == "bit_flip":
        return "X" if r < model.p else "I"
    if model.kind == "phase_flip":
        return "Z" if r < model.p else "I"
    if r >= model.p:
        return "I"
    third = model.p / 3
    if r < third:
        return "X"
    if r < 2 * third:
        return "Y"
    return "Z"


def apply_noise(block: LogicalBlock, model: NoiseModel,
                rng: np.random.Generator) -> tuple[LogicalBlock, list[tuple[int, str]]]:
    """Sample one Kraus branch per physical qubit and apply it.

    Returns the block and the record of applied Paulis as (qubit, label)
    pairs; identity draws are omitted from the record.
    """
    if model.kind == "none":
        return block, []
    state = block.state
    record: list[tuple[int, str]] = []
    for qubit in range(state.num_qubits):
        label = _sample_pauli(model, rng)
        if label != "I":
            state = apply_single(state, PAULI_BY_NAME[label], qubit)
            record.append((qubit, label))
    return LogicalBlock(state=state, block_id=block.block_id), record


def apply_loss(blocks: list[LogicalBlock], model: LossModel,
               rng: np.random.Generator) -> tuple[list[LogicalBlock], list[int]]:
    """Drop each block independently with probability p_loss.

    Returns survivors in order plus their indices into the input list;
    the index list is what both endpoints learn (heralded loss).
    """
    survivors, indices = [], []
    for idx, block in enumerate(blocks):
        if rng.random() >= model.p_loss:
            survivors.append(block)
            indices.append(idx)
    return survivors, indices


def eve_intercept(block: LogicalBlock, strategy: EveStrategy,
                  rng: np.random.Generator) -> LogicalBlock:
    """Apply one eavesdropping strategy to a block in transit.

    intercept_resend_z measures every qubit in Z and forwards the
    collapsed basis state. rotation_guess undoes a guessed rotation,
    measures, then re-applies the guess.
    """
    if strategy.kind == "none":
        return block
    if strategy.kind == "intercept_resend_z":
        _, state = measure_all(block.state, rng)
        return LogicalBlock(state=state, block_id=block.block_id)
    angle = strategy.guess_angle
    if angle is None:
        angle = rng.uniform(0.0, 2.0 * np.pi)
    state = apply_to_all(block.state, rotation_gate(-angle))
    _, state = measure_all(state, rng)
    state = apply_to_all(state, rotation_gate(angle))
    return LogicalBlock(state=state, block_id=block.block_id)
