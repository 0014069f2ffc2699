"""FastAPI service wrapping the simulator.

Endpoints mirror the CLI surface: run a single session, run a batch
experiment, query code-rate bounds, fetch the worked example. The CLI is
a thin client over the same handlers.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..codes import bounds_record
from ..experiments import (
    ExperimentSpec,
    SpecError,
    execute_experiment,
    render_example,
    run_full_session,
    worked_example_trace,
)
from ..protocol import ConfigError
from .schemas import (
    BoundsResponse,
    ExampleResponse,
    ExperimentRequest,
    ExperimentResponse,
    SessionRequest,
    SessionResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="qsdc-css",
        version=__version__,
        description="CSS-error-corrected three-stage QSDC protocol simulator",
    )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/bounds", response_model=BoundsResponse)
    def bounds(n: int, d1: int, d2: int) -> dict:
        try:
            return bounds_record(n, d1, d2)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/example", response_model=ExampleResponse)
    def example() -> ExampleResponse:
        trace = worked_example_trace()
        return ExampleResponse(trace=trace, text=render_example(trace))

    @app.post("/sessions", response_model=SessionResponse)
    def run_one_session(request: SessionRequest) -> SessionResponse:
        try:
            config = request.session.to_domain()
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if request.postprocess:
            transcript, post = run_full_session(config, request.margin)
        else:
            from ..protocol import run_session

            transcript, post = run_session(config), None
        return SessionResponse(
            transcript=transcript.to_dict(include_oracle=request.include_oracle),
            postprocessing=post,
        )

    @app.post("/experiments", response_model=ExperimentResponse)
    def run_batch(request: ExperimentRequest) -> ExperimentResponse:
        try:
            spec = request.to_spec()
        except (SpecError, ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        report, transcripts = execute_experiment(spec)
        return ExperimentResponse(report=report, transcripts=transcripts)

    return app


app = create_app()
