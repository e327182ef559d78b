"""Stroboscopic inclusion testing, lasso certification and multi-lasso covers.

A lasso is certified once the ball at time (i+1)T fits inside the ball at
time iT, with T = k * tau the user-supplied period estimate. The search
stops at the first such i. For systems with 2*pi-periodic coordinates the
stroboscopic center comparison wraps those coordinates (the dynamics is
periodic in them, so containment in the quotient space is what recurrence
means there); the balls themselves keep the plain Euclidean metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import EstimationPolicy
from .errors import DimensionMismatch, TorusLassoError
from .geometry import Ball, wrapped_difference
from .integrator import Tube, extend
from .systems import SystemModel


@dataclass
class Lasso:
    """A certified tube over [0, (i0+1)T] with its stroboscopic data."""

    tube: Tube
    source: np.ndarray
    eps: float
    period_steps: int
    i0: int

    @property
    def T(self) -> float:
        return self.period_steps * self.tube.tau

    @property
    def period_balls(self) -> list:
        return self.tube.balls[:: self.period_steps]

    @property
    def loop_balls(self) -> list:
        """Balls of the looping part, t in [i0*T, (i0+1)*T]."""
        return self.tube.balls[self.i0 * self.period_steps :]


@dataclass
class LassoOutcome:
    """Result of a lasso search: certified, no-inclusion, or blow-up."""

    status: str  # "certified" | "no_inclusion" | "blowup"
    tube: Tube
    lasso: Optional[Lasso] = None
    blowup_step: Optional[int] = None
    reason: Optional[str] = None


@dataclass
class CoverReport:
    """Aggregated outcome of independent lasso searches, in input order."""

    lassos: list = field(default_factory=list)  # (source index, Lasso)
    failures: list = field(default_factory=list)  # (source index, source, reason)
    outcomes: list = field(default_factory=list)  # one LassoOutcome | None per source
    settings: dict = field(default_factory=dict)

    @property
    def all_certified(self) -> bool:
        return not self.failures


def strobe_inside(inner: Ball, outer: Ball, angle_dims=()) -> bool:
    """Ball containment with angle coordinates compared modulo 2*pi."""
    if inner.dim != outer.dim:
        raise DimensionMismatch(f"ball dimensions differ: {inner.dim} vs {outer.dim}")
    d = float(np.linalg.norm(wrapped_difference(inner.center, outer.center, angle_dims)))
    return d + inner.radius <= outer.radius


def find_lasso(
    sys: SystemModel,
    x0: np.ndarray,
    eps: float,
    tau: float,
    k: int,
    max_periods: int,
    policy: EstimationPolicy,
    *,
    w_diam: Optional[float] = None,
    lambda_zero_mode: str = "threshold",
) -> LassoOutcome:
    """Propagate period by period until the inclusion test first succeeds.

    Returns a certified Lasso truncated at (i0+1)T, a no-inclusion outcome
    carrying the full tube for diagnosis, or a blow-up outcome if the radius
    went non-finite before any test could succeed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if max_periods < 1:
        raise ValueError("max_periods must be >= 1")
    if not eps > 0.0:
        raise ValueError("eps must be > 0")
    if w_diam is None:
        w_diam = sys.w_diam

    x0 = np.asarray(x0, dtype=float)
    tube = Tube(tau=tau, balls=[Ball(0.0, x0, eps)])
    for period in range(max_periods):
        extend(sys, tube, k, policy, w_diam=w_diam,
               lambda_zero_mode=lambda_zero_mode)
        if tube.blowup is not None:
            return LassoOutcome(
                status="blowup", tube=tube, blowup_step=tube.blowup,
                reason=tube.blowup_reason,
            )
        inner = tube.balls[(period + 1) * k]
        outer = tube.balls[period * k]
        if strobe_inside(inner, outer, sys.angle_dims):
            lasso = Lasso(tube=tube, source=x0, eps=eps, period_steps=k, i0=period)
            return LassoOutcome(status="certified", tube=tube, lasso=lasso)
    return LassoOutcome(
        status="no_inclusion", tube=tube,
        reason=f"inclusion not reached within {max_periods} periods",
    )


def cover(
    sys: SystemModel,
    sources: Sequence,
    eps: float,
    tau: float,
    k: int,
    max_periods: int,
    policy: EstimationPolicy,
    *,
    w_diam: Optional[float] = None,
    lambda_zero_mode: str = "threshold",
) -> CoverReport:
    """Run find_lasso independently for every source point.

    Per-source failures (including exceptions) are recorded and never abort
    the batch; the report order matches the input order.
    """
    sources = [np.asarray(s, dtype=float) for s in sources]
    if not sources:
        raise ValueError("sources must be nonempty")
    report = CoverReport(
        settings={
            "system": sys.name, "params": dict(sys.params), "eps": eps,
            "tau": tau, "k": k, "max_periods": max_periods,
            "w_diam": sys.w_diam if w_diam is None else w_diam,
            "policy": {
                "samples_grid": policy.samples_grid,
                "samples_random": policy.samples_random,
                "seed": policy.seed,
                "safety_factor": policy.safety_factor,
                "safety_margin": policy.safety_margin,
            },
            "lambda_zero_mode": lambda_zero_mode,
        }
    )
    for idx, src in enumerate(sources):
        try:
            out = find_lasso(
                sys, src, eps, tau, k, max_periods, policy,
                w_diam=w_diam, lambda_zero_mode=lambda_zero_mode,
            )
        except TorusLassoError as exc:
            report.outcomes.append(None)
            report.failures.append((idx, src, f"{type(exc).__name__}: {exc}"))
            continue
        report.outcomes.append(out)
        if out.status == "certified":
            report.lassos.append((idx, out.lasso))
        else:
            reason = out.reason or out.status
            report.failures.append((idx, src, f"{out.status}: {reason}"))
    return report


def ring_sources(
    center: np.ndarray,
    radius: float,
    plane: tuple,
    count: int,
    jitter: float = 0.0,
    seed: int = 0,
) -> np.ndarray:
    """count points evenly spaced on a circle in a coordinate plane.

    The circle lies in the (plane[0], plane[1]) coordinate plane around
    center; each point is then perturbed componentwise by a uniform jitter.
    Deterministic given the seed.
    """
    center = np.asarray(center, dtype=float)
    if count < 1:
        raise ValueError("count must be >= 1")
    if not radius > 0.0:
        raise ValueError("radius must be > 0")
    i, j = plane
    n = center.shape[0]
    if not (0 <= i < n and 0 <= j < n and i != j):
        raise ValueError(f"plane axes {plane} out of range for dimension {n}")
    angles = 2.0 * math.pi * np.arange(count) / count
    pts = np.tile(center, (count, 1))
    pts[:, i] += radius * np.cos(angles)
    pts[:, j] += radius * np.sin(angles)
    if jitter:
        rng = np.random.default_rng(seed)
        pts += rng.uniform(-jitter, jitter, size=pts.shape)
    return pts
