"""Command-line entry point: scenario loading, batch execution, exports.

Exit codes: 0 success (inclusion found / all sources certified), 2 the
search completed but no inclusion was reached, 1 any error (bad scenario,
singularity, radius blow-up).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys as _sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from .constants import EstimationPolicy
from .errors import TorusLassoError
from .integrator import euler_step
from .lasso import CoverReport, cover, find_lasso, ring_sources
from .serialize import (
    outcome_summary,
    write_cover_report,
    write_summary,
    write_trajectory_csv,
    write_tube_csv,
)
from .systems import Scenario, build_system

_POLICY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "samples_grid": {"type": "integer", "minimum": 2},
        "samples_random": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "safety_factor": {"type": "number", "minimum": 1},
        "safety_margin": {"type": "number", "minimum": 0},
    },
}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system", "eps", "tau", "k"],
    "properties": {
        "system": {"enum": ["forced_vdp", "coupled_vdp", "linear"]},
        "params": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
        "matrix": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "x0": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "k": {"type": "integer", "minimum": 1},
        "max_periods": {"type": "integer", "minimum": 1},
        "w": {"type": "number", "minimum": 0},
        "n_steps": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "policy": _POLICY_SCHEMA,
        "sources": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
        "ring": {
            "type": "object",
            "additionalProperties": False,
            "required": ["center", "radius", "plane", "count"],
            "properties": {
                "center": {"type": "array", "items": {"type": "number"}},
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "plane": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 0},
                    "minItems": 2,
                    "maxItems": 2,
                },
                "count": {"type": "integer", "minimum": 1},
                "jitter": {"type": "number", "minimum": 0},
                "seed": {"type": "integer"},
            },
        },
        "workers": {"type": "integer", "minimum": 1},
        "lambda_zero_mode": {"enum": ["threshold", "paper"]},
    },
}


class ScenarioError(TorusLassoError):
    pass


def load_scenario(path, *, seed_override=None, lambda_zero_override=None) -> dict:
    """Read, schema-validate and normalize a scenario file."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"invalid scenario {path}: {exc.message}") from exc
    if seed_override is not None:
        raw["seed"] = seed_override
    if lambda_zero_override is not None:
        raw["lambda_zero_mode"] = lambda_zero_override
    raw.setdefault("seed", 0)
    return raw


def scenario_system(raw: dict):
    return build_system(
        raw["system"], raw.get("params"), matrix=raw.get("matrix"),
        w_halfwidth=raw.get("w"),
    )


def scenario_objects(raw: dict):
    """Build (SystemModel, Scenario, EstimationPolicy) from a raw scenario."""
    sys_model = scenario_system(raw)
    defaults = sys_model.default_scenario
    x0 = raw.get("x0", defaults.get("x0"))
    if x0 is None:
        raise ScenarioError("scenario needs x0 (no default for this system)")
    pol = dict(raw.get("policy", {}))
    pol.setdefault("seed", raw["seed"])
    policy = EstimationPolicy(**pol)
    scen = Scenario(
        system=raw["system"],
        x0=np.asarray(x0, dtype=float),
        eps=raw["eps"],
        tau=raw["tau"],
        k=raw["k"],
        max_periods=raw.get("max_periods", defaults.get("max_periods", 10)),
        w=raw.get("w", 0.0),
        params=raw.get("params", {}),
        seed=raw["seed"],
        n_steps=raw.get("n_steps"),
        policy=policy,
        lambda_zero_mode=raw.get("lambda_zero_mode", "threshold"),
    )
    return sys_model, scen, policy


def cmd_simulate(raw: dict, out) -> int:
    """Plain Euler centers: one CSV row per grid time."""
    sys_model, scen, _ = scenario_objects(raw)
    n_steps = scen.n_steps or scen.k
    x = scen.x0
    times = [0.0]
    states = [x]
    for i in range(n_steps):
        x = euler_step(sys_model, x, scen.tau)
        times.append((i + 1) * scen.tau)
        states.append(x)
    write_trajectory_csv(times, states, out)
    return 0


def cmd_lasso(raw: dict, out) -> int:
    """Single lasso search; writes tube CSV plus a JSON summary."""
    sys_model, scen, policy = scenario_objects(raw)
    t0 = time.perf_counter()
    outcome = find_lasso(
        sys_model, scen.x0, scen.eps, scen.tau, scen.k, scen.max_periods,
        policy, w_diam=2.0 * scen.w, lambda_zero_mode=scen.lambda_zero_mode,
    )
    elapsed = time.perf_counter() - t0
    out = Path(out)
    write_tube_csv(outcome.tube, out)
    summary = outcome_summary(outcome, eps=scen.eps, k=scen.k, timing_s=elapsed)
    write_summary(summary, out.with_suffix(".summary.json"))
    if outcome.status == "certified":
        return 0
    if outcome.status == "no_inclusion":
        print(f"no inclusion: {outcome.reason}", file=_sys.stderr)
        return 2
    print(f"lasso search failed: {outcome.reason}", file=_sys.stderr)
    return 1


def _cover_sources(raw: dict, sys_model) -> list:
    if "sources" in raw:
        sources = [np.asarray(s, dtype=float) for s in raw["sources"]]
    elif "ring" in raw:
        ring = raw["ring"]
        sources = list(
            ring_sources(
                np.asarray(ring["center"], dtype=float),
                ring["radius"],
                tuple(ring["plane"]),
                ring["count"],
                jitter=ring.get("jitter", 0.0),
                seed=ring.get("seed", raw["seed"]),
            )
        )
    else:
        raise ScenarioError("cover needs 'sources' or 'ring' in the scenario")
    if not sources:
        raise ScenarioError("cover source list is empty")
    for s in sources:
        if s.shape[0] != sys_model.dim:
            raise ScenarioError(
                f"source dimension {s.shape[0]} != system dimension {sys_model.dim}"
            )
    return sources


def _cover_worker(payload):
    """Worker: one find_lasso call, exceptions returned as (False, reason)."""
    raw, source = payload
    try:
        sys_model, scen, policy = scenario_objects(raw)
        out = find_lasso(
            sys_model, np.asarray(source, dtype=float), scen.eps, scen.tau,
            scen.k, scen.max_periods, policy, w_diam=2.0 * scen.w,
            lambda_zero_mode=scen.lambda_zero_mode,
        )
    except TorusLassoError as exc:
        return False, f"{type(exc).__name__}: {exc}"
    return True, out


def _parallel_cover(raw, sys_model, sources, scen, policy, workers) -> CoverReport:
    """Pool-based variant of lasso.cover with identical aggregation.

    Each worker rebuilds the system from the raw scenario dict (vector-field
    closures don't pickle); outcomes come back keyed by submission index, so
    the report order matches the input order regardless of completion order.
    """
    report = CoverReport(
        settings={
            "system": sys_model.name, "params": dict(sys_model.params),
            "eps": scen.eps, "tau": scen.tau, "k": scen.k,
            "max_periods": scen.max_periods, "w_diam": 2.0 * scen.w,
            "policy": {
                "samples_grid": policy.samples_grid,
                "samples_random": policy.samples_random,
                "seed": policy.seed,
                "safety_factor": policy.safety_factor,
                "safety_margin": policy.safety_margin,
            },
            "lambda_zero_mode": scen.lambda_zero_mode,
        }
    )
    results = [None] * len(sources)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_cover_worker, (raw, s.tolist())): idx
            for idx, s in enumerate(sources)
        }
        for fut in concurrent.futures.as_completed(futures):
            results[futures[fut]] = fut.result()
    for idx, (ok, payload) in enumerate(results):
        if not ok:
            report.outcomes.append(None)
            report.failures.append((idx, sources[idx], payload))
            continue
        report.outcomes.append(payload)
        if payload.status == "certified":
            report.lassos.append((idx, payload.lasso))
        else:
            reason = payload.reason or payload.status
            report.failures.append((idx, sources[idx], f"{payload.status}: {reason}"))
    return report


def cmd_cover(raw: dict, out_dir, workers=None) -> int:
    """Lasso per source point; per-source tube files plus cover_report.json."""
    sys_model, scen, policy = scenario_objects(raw)
    sources = _cover_sources(raw, sys_model)
    if workers is None:
        workers = raw.get("workers")
    if workers is None:
        env = os.environ.get("TORUS_LASSO_WORKERS")
        workers = int(env) if env else (os.cpu_count() or 1)
    workers = max(1, min(int(workers), len(sources)))

    if workers == 1:
        report = cover(
            sys_model, sources, scen.eps, scen.tau, scen.k, scen.max_periods,
            policy, w_diam=2.0 * scen.w, lambda_zero_mode=scen.lambda_zero_mode,
        )
    else:
        report = _parallel_cover(raw, sys_model, sources, scen, policy, workers)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tube_files = {}
    for idx, outcome in enumerate(report.outcomes):
        if outcome is None:
            continue
        name = f"tube_{idx:03d}.csv"
        write_tube_csv(outcome.tube, out_dir / name)
        write_summary(
            outcome_summary(outcome, eps=scen.eps, k=scen.k),
            out_dir / f"summary_{idx:03d}.json",
        )
        tube_files[idx] = name
    write_cover_report(report, tube_files, out_dir / "cover_report.json")
    return 0 if report.all_certified else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="torus-lasso",
        description="Guaranteed Euler enclosures, lasso certification and torus covers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "plain Euler trajectory export"),
        ("lasso", "single lasso search (tube CSV + summary JSON)"),
        ("cover", "one lasso per source point (directory of tubes + report)"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True,
                       help="output file (simulate/lasso) or directory (cover)")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--lambda-zero-mode", choices=["threshold", "paper"],
                       default=None)
    args = parser.parse_args(argv)
    try:
        raw = load_scenario(
            args.scenario, seed_override=args.seed,
            lambda_zero_override=args.lambda_zero_mode,
        )
        if args.command == "simulate":
            return cmd_simulate(raw, args.out)
        if args.command == "lasso":
            return cmd_lasso(raw, args.out)
        return cmd_cover(raw, args.out, workers=args.workers)
    except (TorusLassoError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
