"""The three-stage session: rotations, traversals, correction, sifting.

Alice encodes N + delta random bits into Steane blocks and rotates every
physical qubit by her secret angle; Bob adds his own rotation without
measuring; Alice removes hers; Bob removes his, runs syndrome correction
and measures. A random sample of gamma blocks is sacrificed to estimate
the error rate, and the round aborts when mismatches exceed the agreed
bound.

Role functions take only their owner's secret angle, never the other
party's, so the secrecy boundary is visible in the call signatures.
The orchestrator `run_session` holds the full configuration, plays the
channel in between, and writes the transcript. Ground-truth channel
events land in the transcript's oracle section only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .binlin import BitVector
from .channel import (
    EveStrategy,
    LossModel,
    NoiseModel,
    apply_loss,
    apply_noise,
    eve_intercept,
)
from .qsim import apply_to_all, rotation_gate
from .steane import LogicalBlock, correct, decode_measure, encode_logical, extract_syndrome

OUTCOME_COMPLETED = "completed"
OUTCOME_ABORTED_QBER = "aborted_qber"
OUTCOME_ABORTED_INSUFFICIENT = "aborted_insufficient_blocks"


class ConfigError(ValueError):
    """A session configuration field is out of range."""


@dataclass(frozen=True)
class SessionConfig:
    """Full parameterization of one protocol run."""

    N: int
    theta: float
    phi: float
    delta: int = 0
    noise: NoiseModel = NoiseModel()
    noise_stages: tuple[bool, bool, bool] = (True, True, True)
    loss: LossModel = LossModel()
    eve: EveStrategy = EveStrategy()
    eve_stage: int = 1
    gamma: int = 0
    t_bound: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "noise_stages", tuple(bool(s) for s in self.noise_stages))
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.t_bound < 0:
            raise ConfigError(f"t_bound must be >= 0, got {self.t_bound}")
        if self.eve_stage not in (1, 2, 3):
            raise ConfigError(f"eve_stage must be 1, 2 or 3, got {self.eve_stage}")
        if len(self.noise_stages) != 3:
            raise ConfigError("noise_stages needs one toggle per traversal")

    def to_dict(self) -> dict:
        return {
            "n": self.N,
            "delta": self.delta,
            "theta": self.theta,
            "phi": self.phi,
            "noise": {"kind": self.noise.kind, "p": self.noise.p,
                      "stages": list(self.noise_stages)},
            "loss": {"p_loss": self.loss.p_loss},
            "eve": {"kind": self.eve.kind, "guess_angle": self.eve.guess_angle,
                    "stage": self.eve_stage},
            "gamma": self.gamma,
            "t_bound": self.t_bound,
            "seed": self.seed,
        }


@dataclass
class Transcript:
    """Event record of one session."""

    outcome: str
    seed: int
    prepared_bits: BitVector
    surviving_indices: list[int]
    measured_bits: Optional[BitVector] = None
    syndrome_log: list[dict] = field(default_factory=list)
    sift_indices: list[int] = field(default_factory=list)
    sift_mismatches: Optional[int] = None
    kept_alice: Optional[BitVector] = None
    kept_bob: Optional[BitVector] = None
    public: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)

    def to_dict(self, include_oracle: bool = True) -> dict:
        doc = {
            "outcome": self.outcome,
            "seed": self.seed,
            "prepared_bits": str(self.prepared_bits),
            "surviving_indices": list(self.surviving_indices),
            "measured_bits": None if self.measured_bits is None else str(self.measured_bits),
            "syndrome_log": self.syndrome_log,
            "sift_indices": list(self.sift_indices),
            "sift_mismatches": self.sift_mismatches,
            "kept_alice": None if self.kept_alice is None else str(self.kept_alice),
            "kept_bob": None if self.kept_bob is None else str(self.kept_bob),
            "public": self.public,
        }
        if include_oracle:
            doc["oracle"] = self.oracle
        return doc


def encode_message(bits: BitVector) -> list[LogicalBlock]:
    """Encode a classical bit string into unrotated Steane blocks."""
    return [encode_logical(bit, block_id=i) for i, bit in enumerate(bits)]


def alice_prepare(num_blocks: int, theta: float,
                  rng: np.random.Generator) -> tuple[list[LogicalBlock], BitVector]:
    """Sample random bits, encode, and rotate every qubit by theta."""
    bits = BitVector(rng.integers(0, 2, size=num_blocks))
    gate = rotation_gate(theta)
    blocks = [
        LogicalBlock(state=apply_to_all(b.state, gate), block_id=b.block_id)
        for b in encode_message(bits)
    ]
    return blocks, bits


def bob_stage2(blocks: list[LogicalBlock], phi: float) -> list[LogicalBlock]:
    """Rotate every qubit by phi; no measurement happens here."""
    gate = rotation_gate(phi)
    return [LogicalBlock(state=apply_to_all(b.state, gate), block_id=b.block_id)
            for b in blocks]


def alice_stage3(blocks: list[LogicalBlock], theta: float) -> list[LogicalBlock]:
    """Remove Alice's rotation, leaving only Bob's on the encoding."""
    gate = rotation_gate(-theta)
    return [LogicalBlock(state=apply_to_all(b.state, gate), block_id=b.block_id)
            for b in blocks]


def bob_finalize(blocks: list[LogicalBlock], phi: float,
                 rng: np.random.Generator) -> tuple[BitVector, list[dict]]:
    """Undo Bob's rotation, correct each block, measure the logical bits."""
    gate = rotation_gate(-phi)
    measured = []
    syndrome_log = []
    for block in blocks:
        block = LogicalBlock(state=apply_to_all(block.state, gate),
                             block_id=block.block_id)
        syndrome, block = extract_syndrome(block, rng)
        block = correct(block, syndrome)
        syndrome_log.append({
            "block": block.block_id,
            "x_bits": str(syndrome.x_bits),
            "z_bits": str(syndrome.z_bits),
            "corrected": not syndrome.is_trivial,
        })
        measured.append(decode_measure(block, rng))
    return BitVector(measured), syndrome_log


@dataclass(frozen=True)
class SiftResult:
    passed: bool
    sift_indices: list[int]
    mismatches: int
    kept_alice: Optional[BitVector]
    kept_bob: Optional[BitVector]


def sift(alice_bits: BitVector, bob_bits: BitVector, gamma: int, t_bound: int,
         rng: np.random.Generator) -> SiftResult:
    """Compare gamma random positions; abort when mismatches exceed t_bound.

    On a pass the sampled positions are removed from both strings.
    """
    if len(alice_bits) != len(bob_bits):
        raise ConfigError("sift requires equal-length bit strings")
    if gamma > len(bob_bits):
        raise ConfigError(f"gamma={gamma} exceeds available blocks {len(bob_bits)}")
    positions = sorted(int(i) for i in rng.choice(len(bob_bits), size=gamma, replace=False))
    mismatches = sum(1 for i in positions if alice_bits[i] != bob_bits[i])
    if mismatches > t_bound:
        return SiftResult(False, positions, mismatches, None, None)
    chosen = set(positions)
    kept_a = BitVector([alice_bits[i] for i in range(len(alice_bits)) if i not in chosen])
    kept_b = BitVector([bob_bits[i] for i in range(len(bob_bits)) if i not in chosen])
    return SiftResult(True, positions, mismatches, kept_a, kept_b)


def _traverse(blocks: list[LogicalBlock], indices: list[int], stage: int,
              config: SessionConfig, rng: np.random.Generator,
              oracle_events: dict) -> tuple[list[LogicalBlock], list[int]]:
    """One channel traversal: eavesdropper, noise, then heralded loss."""
    events = []
    out = []
    for block in blocks:
        if config.eve.kind != "none" and config.eve_stage == stage:
            block = eve_intercept(block, config.eve, rng)
            events.append({"block": block.block_id, "eve": config.eve.kind})
        if config.noise_stages[stage - 1] and config.noise.kind != "none":
            block, record = apply_noise(block, config.noise, rng)
            for qubit, label in record:
                events.append({"block": block.block_id, "qubit": qubit, "pauli": label})
        out.append(block)
    survivors, local = apply_loss(out, config.loss, rng)
    oracle_events[f"stage_{stage}"] = events
    return survivors, [indices[i] for i in local]


def run_session(config: SessionConfig) -> Transcript:
    """Execute one full round: prepare, three traversals, finalize, sift."""
    rng = np.random.default_rng(config.seed)
    total = config.N + config.delta
    blocks, prepared = alice_prepare(total, config.theta, rng)
    indices = list(range(total))
    oracle_events: dict = {}

    blocks, indices = _traverse(blocks, indices, 1, config, rng, oracle_events)
    blocks = bob_stage2(blocks, config.phi)
    blocks, indices = _traverse(blocks, indices, 2, config, rng, oracle_events)
    blocks = alice_stage3(blocks, config.theta)
    blocks, indices = _traverse(blocks, indices, 3, config, rng, oracle_events)

    transcript = Transcript(
        outcome=OUTCOME_COMPLETED,
        seed=config.seed,
        prepared_bits=prepared,
        surviving_indices=indices,
        oracle={"stage_events": oracle_events},
    )
    if len(blocks) < config.N or len(blocks) < config.gamma:
        transcript.outcome = OUTCOME_ABORTED_INSUFFICIENT
        return transcript

    measured, syndrome_log = bob_finalize(blocks, config.phi, rng)
    transcript.measured_bits = measured
    transcript.syndrome_log = syndrome_log

    alice_surviving = BitVector([prepared[i] for i in indices])
    result = sift(alice_surviving, measured, config.gamma, config.t_bound, rng)
    transcript.sift_indices = result.sift_indices
    transcript.sift_mismatches = result.mismatches
    transcript.public["sift_indices"] = result.sift_indices
    if not result.passed:
        transcript.outcome = OUTCOME_ABORTED_QBER
        return transcript

    transcript.kept_alice = result.kept_alice
    transcript.kept_bob = result.kept_bob
    return transcript
