"""Lossless file formats for tubes, summaries and cover reports.

Floats are written with 17 significant digits so that re-parsing reproduces
the Ball sequences bit-exactly. JSON output is key-sorted with fixed
separators, making reruns byte-identical for identical inputs.
"""
from __future__ import annotations

import csv
import json
from typing import Optional

import numpy as np

from .geometry import Ball
from .integrator import Tube
from .lasso import CoverReport, LassoOutcome


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_tube_csv(tube: Tube, path) -> None:
    """One row per grid time: step, t, centers, radius and step constants.

    The constants columns describe the step *starting* at the row's time;
    the final row leaves them empty.
    """
    dim = tube.balls[0].dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["step", "t"] + [f"c{i+1}" for i in range(dim)]
            + ["radius", "lambda", "C", "gamma"]
        )
        for i, b in enumerate(tube.balls):
            row = [str(i), _fmt(b.t)] + [_fmt(c) for c in b.center] + [_fmt(b.radius)]
            if i < len(tube.constants):
                k = tube.constants[i].k
                row += [_fmt(k.lam), _fmt(k.C), _fmt(k.gamma)]
            else:
                row += ["", "", ""]
            w.writerow(row)


def read_tube_csv(path) -> Tube:
    """Re-parse a tube CSV into balls (constants come back as raw floats)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"tube file {path} is empty")
    header = rows[0]
    if header[:2] != ["step", "t"] or "radius" not in header:
        raise ValueError(f"tube file {path} has an unexpected header")
    dim = header.index("radius") - 2
    balls = []
    constants = []
    for row in rows[1:]:
        t = float(row[1])
        center = np.array([float(v) for v in row[2 : 2 + dim]])
        balls.append(Ball(t, center, float(row[2 + dim])))
        if row[3 + dim]:
            constants.append(tuple(float(v) for v in row[3 + dim : 6 + dim]))
    if len(balls) < 2:
        raise ValueError(f"tube file {path} contains no steps")
    tau = balls[1].t - balls[0].t
    tube = Tube(tau=tau, balls=balls)
    tube.raw_constants = constants
    return tube


def _dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, separators=(",", ":"), indent=1)
        fh.write("\n")


def outcome_summary(
    out: LassoOutcome, *, eps: float, k: int, timing_s: Optional[float] = None
) -> dict:
    """JSON-ready summary of a lasso search (timing optional, see cover)."""
    tube = out.tube
    periods = []
    for i in range(0, len(tube.balls), k):
        b = tube.balls[i]
        periods.append(
            {"index": i // k, "t": b.t, "center": [float(c) for c in b.center],
             "radius": b.radius}
        )
    s = {
        "status": out.status,
        "i0": out.lasso.i0 if out.lasso is not None else None,
        "eps": eps,
        "tau": tube.tau,
        "k": k,
        "T": k * tube.tau,
        "source": [float(c) for c in tube.balls[0].center],
        "n_steps": tube.n_steps,
        "periods": periods,
        "blowup_step": out.blowup_step,
        "reason": out.reason,
    }
    if timing_s is not None:
        s["timing_s"] = timing_s
    return s


def write_summary(summary: dict, path) -> None:
    _dump_json(summary, path)


def write_cover_report(report: CoverReport, tube_files: dict, path) -> None:
    """cover_report.json: per-source status keyed by input order.

    Deliberately timing-free so identical scenarios rerun byte-identically.
    """
    results = []
    for idx, out in enumerate(report.outcomes):
        entry: dict = {"index": idx}
        if out is None:
            _, src, reason = next(f for f in report.failures if f[0] == idx)
            entry.update(status="error", reason=reason,
                         source=[float(c) for c in src])
        else:
            entry.update(
                status=out.status,
                i0=out.lasso.i0 if out.lasso is not None else None,
                source=[float(c) for c in out.tube.balls[0].center],
                n_steps=out.tube.n_steps,
                final_radius=out.tube.balls[-1].radius,
                reason=out.reason,
            )
        if idx in tube_files:
            entry["tube_file"] = tube_files[idx]
        results.append(entry)
    _dump_json({"settings": report.settings, "results": results}, path)


def write_trajectory_csv(times, states, path) -> None:
    """Plain Euler trajectory: t, x1..xn per row."""
    states = np.asarray(states)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{i+1}" for i in range(states.shape[1])])
        for t, x in zip(times, states):
            w.writerow([_fmt(t)] + [_fmt(v) for v in x])
