"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..channel import EveStrategy, LossModel, NoiseModel
from ..experiments import DEFAULT_MARGIN, ExperimentSpec
from ..protocol import SessionConfig


class NoiseSpec(BaseModel):
    kind: Literal["none", "bit_flip", "phase_flip", "depolarizing"] = "none"
    p: float = Field(default=0.0, ge=0.0, le=1.0)
    stages: tuple[bool, bool, bool] = (True, True, True)


class LossSpec(BaseModel):
    p_loss: float = Field(default=0.0, ge=0.0, le=1.0)


class EveSpec(BaseModel):
    kind: Literal["none", "intercept_resend_z", "rotation_guess"] = "none"
    guess_angle: Optional[float] = None
    stage: Literal[1, 2, 3] = 1


class SessionSpec(BaseModel):
    """Mirrors SessionConfig; `n` is the target key-block count."""

    n: int = Field(ge=1)
    theta: float
    phi: float
    delta: int = Field(default=0, ge=0)
    noise: NoiseSpec = NoiseSpec()
    loss: LossSpec = LossSpec()
    eve: EveSpec = EveSpec()
    gamma: int = Field(default=0, ge=0)
    t_bound: int = Field(default=0, ge=0)
    seed: int = 0

    def to_domain(self) -> SessionConfig:
        return SessionConfig(
            N=self.n,
            delta=self.delta,
            theta=self.theta,
            phi=self.phi,
            noise=NoiseModel(kind=self.noise.kind, p=self.noise.p),
            noise_stages=self.noise.stages,
            loss=LossModel(p_loss=self.loss.p_loss),
            eve=EveStrategy(kind=self.eve.kind, guess_angle=self.eve.guess_angle),
            eve_stage=self.eve.stage,
            gamma=self.gamma,
            t_bound=self.t_bound,
            seed=self.seed,
        )


class SessionRequest(BaseModel):
    session: SessionSpec
    include_oracle: bool = True
    postprocess: bool = True
    margin: int = Field(default=DEFAULT_MARGIN, ge=0)


class SessionResponse(BaseModel):
    transcript: dict
    postprocessing: Optional[dict] = None


class BoundsQuery(BaseModel):
    n: int = Field(ge=1)
    d1: int = Field(ge=1)
    d2: int = Field(ge=1)


class BoundsResponse(BaseModel):
    n: int
    d1: int
    d2: int
    rate_bound: float
    gv_k1: float
    gv_k2: float


class ExperimentRequest(BaseModel):
    scenario: Literal["noiseless", "noise_sweep", "eve_detection",
                      "paper_example", "bounds_report"]
    session: Optional[SessionSpec] = None
    sessions: int = Field(default=1, ge=1)
    p_values: list[float] = []
    bounds: list[BoundsQuery] = []
    margin: int = Field(default=DEFAULT_MARGIN, ge=0)
    seed: int = 0
    no_oracle: bool = False

    def to_spec(self) -> ExperimentSpec:
        kwargs: dict = {
            "scenario": self.scenario,
            "sessions": self.sessions,
            "p_values": tuple(self.p_values),
            "margin": self.margin,
            "seed": self.seed,
            "no_oracle": self.no_oracle,
        }
        if self.session is not None:
            kwargs["base"] = self.session.to_domain()
        if self.bounds:
            kwargs["bounds_queries"] = tuple((b.n, b.d1, b.d2) for b in self.bounds)
        return ExperimentSpec(**kwargs)


class ExperimentResponse(BaseModel):
    report: dict
    transcripts: Optional[list[dict]] = None


class ExampleResponse(BaseModel):
    trace: dict
    text: str
