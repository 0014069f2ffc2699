"""Command-line client for the simulator.

Subcommands run against the in-process engine by default; pass --server
to route the same request through a running HTTP service instead. `serve`
starts that service.

Exit codes: 0 success, 1 configuration error, 2 runtime failure,
3 self-check failure inside a scenario (for CI gating).
"""

from __future__ import annotations

import sys

import click

from .codes import bounds_record
from .experiments import (
    SpecError,
    canonical_json,
    load_spec,
    render_example,
    run_experiment,
    worked_example_trace,
    write_report,
)
from .protocol import ConfigError

EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_CHECKS = 3


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _spec_payload(spec) -> dict:
    return {
        "scenario": spec.scenario,
        "session": spec.base.to_dict(),
        "sessions": spec.sessions,
        "p_values": list(spec.p_values),
        "bounds": [{"n": n, "d1": d1, "d2": d2} for n, d1, d2 in spec.bounds_queries],
        "margin": spec.margin,
        "seed": spec.seed,
        "no_oracle": spec.no_oracle,
    }


def _post(server: str, path: str, payload: dict) -> dict:
    import httpx

    response = httpx.post(f"{server.rstrip('/')}{path}", json=payload, timeout=600.0)
    if response.status_code != 200:
        _fail(EXIT_RUNTIME, f"server returned {response.status_code}: {response.text}")
    return response.json()


def _get(server: str, path: str, params: dict) -> dict:
    import httpx

    response = httpx.get(f"{server.rstrip('/')}{path}", params=params, timeout=60.0)
    if response.status_code != 200:
        code = EXIT_CONFIG if response.status_code == 422 else EXIT_RUNTIME
        _fail(code, f"server returned {response.status_code}: {response.text}")
    return response.json()


@click.group()
def main():
    """Simulate the CSS-protected three-stage secure communication protocol."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="TOML experiment spec.")
@click.option("--seed", type=int, default=None, help="Override the spec's seed.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for report.json and companions.")
@click.option("--no-oracle", is_flag=True, help="Strip oracle fields from transcripts.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Parallel session workers.")
@click.option("--server", default=None, help="Run on a remote service instead.")
def run(config_path, seed, out_dir, no_oracle, jobs, server):
    """Run the experiment described by a TOML config."""
    try:
        spec = load_spec(config_path, seed=seed, out_dir=out_dir,
                         no_oracle=no_oracle, jobs=jobs)
    except (SpecError, ConfigError, OSError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    try:
        if server:
            body = _post(server, "/experiments", _spec_payload(spec))
            report = body["report"]
            if out_dir is not None:
                write_report(report, body.get("transcripts"), out_dir)
        else:
            report = run_experiment(spec)
    except (SpecError, ConfigError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except OSError as exc:
        _fail(EXIT_RUNTIME, f"I/O failure: {exc}")
    if out_dir is None:
        click.echo(canonical_json(report))
    else:
        click.echo(f"report written to {out_dir}")
    checks = report.get("checks")
    if checks is not None and not all(checks.values()):
        _fail(EXIT_CHECKS, "scenario self-checks failed")


@main.command()
@click.option("--n", required=True, type=int)
@click.option("--d1", required=True, type=int)
@click.option("--d2", required=True, type=int)
@click.option("--server", default=None, help="Query a remote service instead.")
def bounds(n, d1, d2, server):
    """Print the code-rate and dimension bounds for one (n, d1, d2) query."""
    if server:
        record = _get(server, "/bounds", {"n": n, "d1": d1, "d2": d2})
    else:
        try:
            record = bounds_record(n, d1, d2)
        except ValueError as exc:
            _fail(EXIT_CONFIG, str(exc))
    click.echo(canonical_json(record))


@main.command()
@click.option("--json", "as_json", is_flag=True, help="Print the trace as JSON.")
@click.option("--server", default=None, help="Fetch from a remote service instead.")
def example(as_json, server):
    """Print the worked five-bit example trace."""
    if server:
        body = _get(server, "/example", {})
        trace, text = body["trace"], body["text"]
    else:
        trace = worked_example_trace()
        text = render_example(trace)
    click.echo(canonical_json(trace) if as_json else text)
    if not all(trace["checks"].values()):
        _fail(EXIT_CHECKS, "example self-checks failed")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
