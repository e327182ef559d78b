"""Ball propagation along the nominal Euler trajectory.

Each step certifies local constants on a box enclosing the Euler segment
plus the current ball, evaluates the error-radius formula over the step,
and re-seeds the next step with the end-of-step radius. Regions are built
by inflate-and-verify: the candidate box is the segment bounding box grown
by kappa * radius + m_abs, and the step is redone with doubled kappa if the
within-step radius ever exceeds that inflation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import BoxRegion, EstimationPolicy, LocalConstants, estimate_constants
from .errors import BoundBlowup, SingularityError, TorusLassoError
from .geometry import Ball, delta
from .systems import SystemModel


@dataclass
class Tube:
    """Grid-time sequence of certified balls with their local constants.

    blowup is the index of the first step whose radius went non-finite (the
    tube is truncated there); blowup_reason carries the diagnostic.
    """

    tau: float
    balls: list = field(default_factory=list)
    constants: list = field(default_factory=list)
    blowup: Optional[int] = None
    blowup_reason: Optional[str] = None

    @property
    def n_steps(self) -> int:
        return len(self.balls) - 1

    @property
    def times(self) -> np.ndarray:
        return np.array([b.t for b in self.balls])

    @property
    def centers(self) -> np.ndarray:
        return np.array([b.center for b in self.balls])

    @property
    def radii(self) -> np.ndarray:
        return np.array([b.radius for b in self.balls])


def euler_step(sys: SystemModel, x: np.ndarray, tau: float) -> np.ndarray:
    """One explicit Euler step of the undisturbed system: x + tau * f(x, 0)."""
    if tau <= 0.0:
        raise ValueError("tau must be > 0")
    x = np.asarray(x, dtype=float)
    fx = sys.f(x, 0.0)
    if not np.all(np.isfinite(fx)):
        raise TorusLassoError(f"trajectory escape: non-finite f at {x}")
    return x + tau * fx


def propagate(
    sys: SystemModel,
    b0: Ball,
    tau: float,
    n_steps: int,
    policy: EstimationPolicy,
    *,
    w_diam: Optional[float] = None,
    lambda_zero_mode: str = "threshold",
    kappa: float = 1.5,
    m_abs: float = 1e-6,
    n_sub: int = 8,
    max_retries: int = 8,
) -> Tube:
    """Propagate a ball enclosure for n_steps Euler steps of size tau.

    The tube centers depend only on the undisturbed field; the disturbance
    set (diameter w_diam, default from the system) affects radii only. On
    radius blow-up the tube is truncated with the offending step recorded.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if w_diam is None:
        w_diam = sys.w_diam
    tube = Tube(tau=tau, balls=[Ball(0.0, b0.center, b0.radius)])
    extend(
        sys, tube, n_steps, policy,
        w_diam=w_diam, lambda_zero_mode=lambda_zero_mode, kappa=kappa,
        m_abs=m_abs, n_sub=n_sub, max_retries=max_retries,
    )
    return tube


def extend(
    sys: SystemModel,
    tube: Tube,
    n_steps: int,
    policy: EstimationPolicy,
    *,
    w_diam: float = 0.0,
    lambda_zero_mode: str = "threshold",
    kappa: float = 1.5,
    m_abs: float = 1e-6,
    n_sub: int = 8,
    max_retries: int = 8,
) -> Tube:
    """Append n_steps certified steps to an existing tube (in place)."""
    if tube.blowup is not None:
        return tube
    x = tube.balls[-1].center
    rad = tube.balls[-1].radius
    base = len(tube.balls) - 1
    # within-step sample times: interior points plus the step endpoint
    frac = np.linspace(0.0, 1.0, n_sub + 2)[1:]
    prev = tube.constants[-1] if tube.constants else None
    prev_pair = (prev.region, prev.k) if prev is not None else None

    for i in range(base, base + n_steps):
        try:
            xn = euler_step(sys, x, tube.tau)
        except (SingularityError, TorusLassoError) as exc:
            tube.blowup = i
            tube.blowup_reason = f"trajectory escape: {exc}"
            return tube
        seg_lo, seg_hi = np.minimum(x, xn), np.maximum(x, xn)
        kap = kappa
        ok = False
        try:
            for _ in range(max_retries):
                infl = kap * rad + m_abs
                region = BoxRegion(seg_lo - infl, seg_hi + infl)
                if prev_pair is not None and prev_pair[0].contains(region):
                    region, k = prev_pair
                    infl_lo = seg_lo - region.lo
                    infl_hi = region.hi - seg_hi
                    headroom = float(min(infl_lo.min(), infl_hi.min()))
                else:
                    k = estimate_constants(sys, region, policy, w_diam=w_diam)
                    headroom = infl
                step_radii = [
                    delta(rad, k, float(s * tube.tau), lambda_zero_mode=lambda_zero_mode)
                    for s in frac
                ]
                if max(step_radii) <= headroom:
                    ok = True
                    break
                # enclosure violated: retry with a larger box, never a cached one
                prev_pair = None
                kap *= 2.0
            if not ok:
                # the certified prefix of the tube remains valid; record the
                # failed step like a blow-up instead of discarding everything
                tube.blowup = i
                tube.blowup_reason = (
                    f"step enclosure not reached after {max_retries} retries"
                )
                return tube
        except BoundBlowup as exc:
            tube.blowup = i
            tube.blowup_reason = str(exc)
            return tube
        except SingularityError as exc:
            tube.blowup = i
            tube.blowup_reason = f"region reached the singular set: {exc}"
            return tube
        rad = step_radii[-1]
        x = xn
        prev_pair = (region, k)
        tube.constants.append(LocalConstants(region=region, k=k, step_index=i))
        tube.balls.append(Ball((i + 1) * tube.tau, xn, rad))
    return tube
