"""Batch experiment scenarios, aggregation, and report files.

A spec names one scenario (noiseless, noise_sweep, eve_detection,
paper_example, bounds_report), the session grid, and a seed. Reports are
deterministic: the same spec and seed produce byte-identical JSON and CSV
output, and every report embeds the resolved configuration it ran with.

Per-trial RNG streams are derived from (seed, group, trial) through
SeedSequence, so sessions are independent and a parallel run returns the
same bytes as a sequential one.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .binlin import BitMatrix, BitVector, xor
from .channel import EveStrategy, LossModel, NoiseModel
from .codes import bounds_record, make_linear_code, steane_css
from .protocol import (
    OUTCOME_COMPLETED,
    ConfigError,
    SessionConfig,
    Transcript,
    bob_finalize,
    encode_message,
    run_session,
)
from .qsim import apply_to_all, fidelity, rotation_gate
from .reconcile import amplify_agreed_key, bob_recover, coset_key, reconcile_keys
from .steane import LogicalBlock, encode_logical

SCENARIOS = ("noiseless", "noise_sweep", "eve_detection", "paper_example", "bounds_report")
DEFAULT_MARGIN = 8
_RECONCILE_TAG = 0x5EC0

DEFAULT_BASE = SessionConfig(N=1, theta=0.0, phi=0.0)


class SpecError(ValueError):
    """An experiment spec field is missing or out of range."""


@dataclass(frozen=True)
class ExperimentSpec:
    """One batch experiment: scenario, grid, base session, seed."""

    scenario: str
    base: SessionConfig = DEFAULT_BASE
    sessions: int = 1
    p_values: tuple[float, ...] = ()
    bounds_queries: tuple[tuple[int, int, int], ...] = ((7, 3, 4),)
    margin: int = DEFAULT_MARGIN
    seed: int = 0
    out_dir: Optional[str] = None
    no_oracle: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise SpecError(f"scenario: unknown scenario {self.scenario!r}")
        if self.sessions < 1:
            raise SpecError(f"sessions: must be >= 1, got {self.sessions}")
        if self.jobs < 1:
            raise SpecError(f"jobs: must be >= 1, got {self.jobs}")
        if self.margin < 0:
            raise SpecError(f"margin: must be >= 0, got {self.margin}")
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        for p in self.p_values:
            if not 0.0 <= p <= 1.0:
                raise SpecError(f"p_values: entries must lie in [0, 1], got {p}")
        object.__setattr__(
            self, "bounds_queries",
            tuple((int(n), int(d1), int(d2)) for n, d1, d2 in self.bounds_queries))


def _trial_seed(base_seed: int, *parts: int) -> int:
    seq = np.random.SeedSequence((base_seed,) + parts)
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def run_full_session(config: SessionConfig, margin: int = DEFAULT_MARGIN
                     ) -> tuple[Transcript, Optional[dict]]:
    """One session plus the classical post-processing chain.

    On completion the kept bits are chunked, reconciled against the Steane
    pair, and the agreed key is privacy-amplified. Public-channel messages
    (declared vectors, hash seed) are added to the transcript's public
    section; the returned summary holds the keys.
    """
    transcript = run_session(config)
    if transcript.outcome != OUTCOME_COMPLETED:
        return transcript, None
    css = steane_css()
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, _RECONCILE_TAG)))
    result = reconcile_keys(transcript.kept_alice, transcript.kept_bob, css, rng)
    pa = amplify_agreed_key(result, margin, rng)
    transcript.public["declared"] = [str(b.declared) for b in result.blocks]
    if pa is not None:
        transcript.public["hash_seed"] = pa["hash_seed"]
    summary = {
        "chunks": len(result.blocks),
        "decode_failures": result.decode_failures,
        "keys_agree": result.keys_agree,
        "alice_key": str(result.alice_key),
        "bob_key": None if result.bob_key is None else str(result.bob_key),
        "amplified": pa,
    }
    return transcript, summary


def _run_trial(args: tuple[SessionConfig, int]) -> tuple[Transcript, Optional[dict]]:
    config, margin = args
    return run_full_session(config, margin)


def _run_batch(configs: Sequence[SessionConfig], margin: int,
               jobs: int) -> list[tuple[Transcript, Optional[dict]]]:
    work = [(c, margin) for c in configs]
    if jobs <= 1 or len(work) <= 1:
        return [_run_trial(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_trial, work, chunksize=8))


def _session_row(trial: int, config: SessionConfig, transcript: Transcript,
                 post: Optional[dict]) -> dict:
    qber = None
    if transcript.sift_mismatches is not None and config.gamma > 0:
        qber = transcript.sift_mismatches / config.gamma
    return {
        "trial": trial,
        "seed": config.seed,
        "outcome": transcript.outcome,
        "sift_mismatches": transcript.sift_mismatches,
        "qber_sift": qber,
        "keys_agree": None if post is None else post["keys_agree"],
        "final_key_bits": 0 if post is None or post["amplified"] is None
        else post["amplified"]["m"],
    }


def wilson_interval(successes: int, total: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def _aggregate(rows: Sequence[dict]) -> dict:
    total = len(rows)
    aborts = sum(1 for r in rows if r["outcome"] != OUTCOME_COMPLETED)
    qbers = [r["qber_sift"] for r in rows if r["qber_sift"] is not None]
    agreements = [r["keys_agree"] for r in rows if r["keys_agree"] is not None]
    key_bits = [r["final_key_bits"] for r in rows]
    lo, hi = wilson_interval(aborts, total)
    return {
        "sessions": total,
        "abort_rate": aborts / total,
        "abort_rate_ci95": [lo, hi],
        "qber_mean": float(np.mean(qbers)) if qbers else None,
        "qber_std": float(np.std(qbers)) if qbers else None,
        "key_agreement_rate": (sum(agreements) / len(agreements)) if agreements else None,
        "mean_final_key_bits": float(np.mean(key_bits)) if key_bits else 0.0,
    }


def _session_scenario_configs(spec: ExperimentSpec, group: int,
                              override: Optional[NoiseModel] = None,
                              eve: Optional[EveStrategy] = None) -> list[SessionConfig]:
    configs = []
    for trial in range(spec.sessions):
        cfg = replace(
            spec.base,
            noise=override if override is not None else spec.base.noise,
            eve=eve if eve is not None else spec.base.eve,
            seed=_trial_seed(spec.seed, group, trial),
        )
        configs.append(cfg)
    return configs


def _run_sessions(spec: ExperimentSpec, configs: list[SessionConfig]
                  ) -> tuple[list[dict], list[dict]]:
    outputs = _run_batch(configs, spec.margin, spec.jobs)
    rows = [_session_row(i, cfg, tr, post)
            for i, (cfg, (tr, post)) in enumerate(zip(configs, outputs))]
    docs = [tr.to_dict(include_oracle=not spec.no_oracle) for tr, _ in outputs]
    return rows, docs


def worked_example_trace(theta: float = 0.7, phi: float = 1.1, seed: int = 11) -> dict:
    """The five-bit worked transmission plus the three-bit reconciliation.

    Encodes 10101 into five logical blocks, checks each against a fresh
    encoding, runs the noiseless three-stage round, and replays the
    abstract reconciliation arithmetic: x=101 masked by v=011, declaration
    110, and the recovery of v from the declaration.
    """
    message = BitVector("10101")
    blocks = encode_message(message)
    block_fidelities = [
        fidelity(b.state, encode_logical(bit).state)
        for b, bit in zip(blocks, message)
    ]

    rng = np.random.default_rng(seed)
    theta_gate, phi_gate = rotation_gate(theta), rotation_gate(phi)
    stage1 = [LogicalBlock(apply_to_all(b.state, theta_gate), b.block_id) for b in blocks]
    stage2 = [LogicalBlock(apply_to_all(b.state, phi_gate), b.block_id) for b in stage1]
    stage3 = [LogicalBlock(apply_to_all(b.state, rotation_gate(-theta)), b.block_id)
              for b in stage2]
    measured, syndrome_log = bob_finalize(stage3, phi, rng)

    sift_positions = [3, 4]  # the last two bits, as in the worked walkthrough
    mismatches = sum(1 for i in sift_positions if message[i] != measured[i])
    x = BitVector([measured[i] for i in range(len(measured)) if i not in sift_positions])

    v = BitVector("011")
    declared = xor(x, v)
    trivial_code = make_linear_code(BitMatrix.identity(3))
    recovered = bob_recover(x, declared, trivial_code)

    return {
        "message": str(message),
        "logical_blocks": ["|1_L>" if b else "|0_L>" for b in message],
        "block_fidelities": block_fidelities,
        "theta": theta,
        "phi": phi,
        "measured": str(measured),
        "syndrome_log": syndrome_log,
        "sift_positions": sift_positions,
        "sift_mismatches": mismatches,
        "x": str(x),
        "v": str(v),
        "declared": str(declared),
        "recovered_v": str(recovered),
        "checks": {
            "blocks_match_encodings": all(abs(f - 1.0) < 1e-10 for f in block_fidelities),
            "measured_equals_message": str(measured) == str(message),
            "recovery_matches_v": recovered == v,
            "declared_is_110": str(declared) == "110",
        },
    }


def render_example(trace: dict) -> str:
    """Human-readable rendering of the worked example trace."""
    lines = [
        "Three-stage round with Steane-encoded blocks",
        f"  message          : {trace['message']}",
        f"  encoded blocks   : {' '.join(trace['logical_blocks'])}",
        f"  block fidelities : {', '.join(f'{f:.6f}' for f in trace['block_fidelities'])}",
        f"  secret angles    : theta={trace['theta']}, phi={trace['phi']}",
        f"  measured by Bob  : {trace['measured']}",
        f"  sift positions   : {trace['sift_positions']} "
        f"({trace['sift_mismatches']} mismatches)",
        "Reconciliation on the kept bits",
        f"  x                : {trace['x']}",
        f"  v                : {trace['v']}",
        f"  declared x+v     : {trace['declared']}",
        f"  Bob recovers v   : {trace['recovered_v']}",
        "Checks",
    ]
    for name, ok in trace["checks"].items():
        lines.append(f"  {name}: {'ok' if ok else 'FAILED'}")
    return "\n".join(lines)


def execute_experiment(spec: ExperimentSpec) -> tuple[dict, Optional[list[dict]]]:
    """Execute one scenario; returns the report and any session transcripts."""
    report = {
        "scenario": spec.scenario,
        "seed": spec.seed,
        "config": spec.base.to_dict(),
        "margin": spec.margin,
        "no_oracle": spec.no_oracle,
    }
    transcripts: Optional[list[dict]] = None

    if spec.scenario == "noiseless":
        configs = _session_scenario_configs(
            spec, 0, override=NoiseModel(), eve=EveStrategy())
        rows, transcripts = _run_sessions(spec, configs)
        report["results"] = {"aggregate": _aggregate(rows), "sessions": rows}

    elif spec.scenario == "noise_sweep":
        kind = spec.base.noise.kind if spec.base.noise.kind != "none" else "depolarizing"
        grid = []
        transcripts = []
        for gi, p in enumerate(spec.p_values):
            configs = _session_scenario_configs(spec, gi, override=NoiseModel(kind, p))
            rows, docs = _run_sessions(spec, configs)
            transcripts.extend(docs)
            entry = {"p": p, "kind": kind}
            entry.update(_aggregate(rows))
            grid.append(entry)
        report["results"] = {"grid": grid}

    elif spec.scenario == "eve_detection":
        eve = spec.base.eve if spec.base.eve.kind != "none" else \
            EveStrategy(kind="intercept_resend_z")
        baseline_cfgs = _session_scenario_configs(spec, 0, eve=EveStrategy())
        eve_cfgs = _session_scenario_configs(spec, 1, eve=eve)
        baseline_rows, baseline_docs = _run_sessions(spec, baseline_cfgs)
        eve_rows, eve_docs = _run_sessions(spec, eve_cfgs)
        transcripts = baseline_docs + eve_docs
        eve_agg = _aggregate(eve_rows)
        report["results"] = {
            "baseline": _aggregate(baseline_rows),
            "eve": eve_agg,
            "eve_strategy": eve.kind,
            "detection_rate": eve_agg["abort_rate"],
            "detection_ci95": eve_agg["abort_rate_ci95"],
        }

    elif spec.scenario == "paper_example":
        trace = worked_example_trace()
        report["results"] = trace
        report["checks"] = trace["checks"]

    else:  # bounds_report
        report["results"] = {
            "records": [bounds_record(n, d1, d2) for n, d1, d2 in spec.bounds_queries]
        }

    return report, transcripts


def run_experiment(spec: ExperimentSpec) -> dict:
    """Execute one scenario and write its files when an output dir is set."""
    report, transcripts = execute_experiment(spec)
    if spec.out_dir is not None:
        write_report(report, transcripts, spec.out_dir)
    return report


def summarize(reports: Sequence[dict]) -> dict:
    """Aggregate statistics across reports of one scenario."""
    if not reports:
        raise ValueError("at least one report required")
    scenarios = {r["scenario"] for r in reports}
    if len(scenarios) > 1:
        raise ValueError(f"mixed scenarios cannot be summarized: {sorted(scenarios)}")
    scenario = scenarios.pop()
    if scenario == "noiseless":
        rows = [row for r in reports for row in r["results"]["sessions"]]
        return {"scenario": scenario, "aggregate": _aggregate(rows)}
    if scenario == "noise_sweep":
        merged: dict = {}
        for r in reports:
            for entry in r["results"]["grid"]:
                merged.setdefault(entry["p"], []).append(entry)
        return {"scenario": scenario,
                "grid": [entries[0] if len(entries) == 1 else _merge_grid(entries)
                         for _, entries in sorted(merged.items())]}
    if scenario == "eve_detection":
        rates = [r["results"]["detection_rate"] for r in reports]
        return {"scenario": scenario,
                "detection_rate_mean": float(np.mean(rates)),
                "reports": len(reports)}
    return {"scenario": scenario, "reports": len(reports)}


def _merge_grid(entries: list[dict]) -> dict:
    total = sum(e["sessions"] for e in entries)
    aborted = sum(round(e["abort_rate"] * e["sessions"]) for e in entries)
    lo, hi = wilson_interval(aborted, total)
    return {
        "p": entries[0]["p"],
        "kind": entries[0]["kind"],
        "sessions": total,
        "abort_rate": aborted / total,
        "abort_rate_ci95": [lo, hi],
        "qber_mean": float(np.mean([e["qber_mean"] for e in entries
                                    if e["qber_mean"] is not None] or [np.nan])),
        "qber_std": None,
        "key_agreement_rate": None,
        "mean_final_key_bits": float(np.mean([e["mean_final_key_bits"] for e in entries])),
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_report(report: dict, transcripts: Optional[list[dict]], out_dir: str) -> list[Path]:
    """Write report.json (+ transcripts.jsonl, sweep.csv) deterministically."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    report_path = out / "report.json"
    report_path.write_text(canonical_json(report) + "\n")
    written.append(report_path)
    if transcripts is not None:
        tpath = out / "transcripts.jsonl"
        tpath.write_text("".join(canonical_json(t) + "\n" for t in transcripts))
        written.append(tpath)
    if report["scenario"] == "noise_sweep":
        cpath = out / "sweep.csv"
        cpath.write_text(_sweep_csv(report["results"]["grid"]))
        written.append(cpath)
    return written


_SWEEP_COLUMNS = ("p", "kind", "sessions", "abort_rate", "qber_mean", "qber_std",
                  "key_agreement_rate", "mean_final_key_bits")


def _sweep_csv(grid: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SWEEP_COLUMNS)
    for entry in grid:
        writer.writerow([entry[c] for c in _SWEEP_COLUMNS])
    return buf.getvalue()


def _require(table: dict, key: str, path: str):
    if key not in table:
        raise SpecError(f"{path}.{key}: missing required field")
    return table[key]


def _session_from_table(table: dict, path: str = "session") -> SessionConfig:
    noise_tbl = table.get("noise", {})
    loss_tbl = table.get("loss", {})
    eve_tbl = table.get("eve", {})
    try:
        noise = NoiseModel(kind=noise_tbl.get("kind", "none"),
                           p=float(noise_tbl.get("p", 0.0)))
    except ValueError as exc:
        raise SpecError(f"{path}.noise: {exc}") from exc
    try:
        loss = LossModel(p_loss=float(loss_tbl.get("p_loss", 0.0)))
    except ValueError as exc:
        raise SpecError(f"{path}.loss: {exc}") from exc
    try:
        eve = EveStrategy(kind=eve_tbl.get("kind", "none"),
                          guess_angle=eve_tbl.get("guess_angle"))
    except ValueError as exc:
        raise SpecError(f"{path}.eve: {exc}") from exc
    try:
        return SessionConfig(
            N=int(_require(table, "n", path)),
            delta=int(table.get("delta", 0)),
            theta=float(_require(table, "theta", path)),
            phi=float(_require(table, "phi", path)),
            noise=noise,
            noise_stages=tuple(noise_tbl.get("stages", (True, True, True))),
            loss=loss,
            eve=eve,
            eve_stage=int(eve_tbl.get("stage", 1)),
            gamma=int(table.get("gamma", 0)),
            t_bound=int(table.get("t_bound", 0)),
        )
    except ConfigError as exc:
        raise SpecError(f"{path}: {exc}") from exc


def load_spec(path: str | Path, seed: Optional[int] = None,
              out_dir: Optional[str] = None, no_oracle: bool = False,
              jobs: int = 1) -> ExperimentSpec:
    """Parse a TOML experiment file; CLI flags override file values."""
    raw = Path(path).read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"config: not valid TOML ({exc})") from exc
    scenario = _require(data, "scenario", "config")
    base = DEFAULT_BASE
    if "session" in data:
        base = _session_from_table(data["session"])
    elif scenario in ("noiseless", "noise_sweep", "eve_detection"):
        raise SpecError("session: missing required table for session scenarios")
    bounds = data.get("bounds", [])
    queries = []
    for i, entry in enumerate(bounds):
        try:
            queries.append((int(entry["n"]), int(entry["d1"]), int(entry["d2"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"bounds[{i}]: needs integer n, d1, d2") from exc
    if seed is None:
        seed = int(data.get("seed", 0))
    return ExperimentSpec(
        scenario=scenario,
        base=base,
        sessions=int(data.get("sessions", 1)),
        p_values=tuple(float(p) for p in data.get("p_values", ())),
        bounds_queries=tuple(queries) if queries else ((7, 3, 4),),
        margin=int(data.get("margin", DEFAULT_MARGIN)),
        seed=seed,
        out_dir=out_dir,
        no_oracle=no_oracle,
        jobs=jobs,
    )
