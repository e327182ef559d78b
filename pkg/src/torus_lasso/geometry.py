"""Certified error-radius formulas and elementary ball geometry.

The central object is ``delta``: given an initial radius ``eps``, the
one-sided Lipschitz constant ``lambda``, the magnitude constant ``C``, the
disturbance coupling ``gamma`` and the disturbance-set diameter ``|W|``, it
evaluates the proven upper bound on the distance between any exact disturbed
solution started in B(x0, eps) and the nominal Euler step, at in-step time t.

All functions here are pure and stateless; they are safe to call from any
number of threads simultaneously.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundBlowup, DimensionMismatch

#: exponent argument beyond which exp() is treated as a blow-up outright
_EXP_LIMIT = 700.0

#: default half-width of the dead zone around lambda = 0 (see branch rules)
LAMBDA_TOL = 1e-9


@dataclass(frozen=True)
class Ball:
    """A time-tagged enclosure ball B(center, radius)."""

    t: float
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", center)
        if not np.all(np.isfinite(center)):
            raise ValueError("ball center must be finite")
        if not (self.radius >= 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be finite and >= 0, got {self.radius}")
        if not (self.t >= 0.0):
            raise ValueError(f"ball time must be >= 0, got {self.t}")

    @property
    def dim(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class BoundConstants:
    """Constants feeding the error-radius formula.

    lam     one-sided Lipschitz (logarithmic Lipschitz) constant, 1/s
    C       sup of L * ||f(y)|| over the certified region
    gamma   disturbance coupling constant
    w_diam  diameter |W| of the disturbance set
    """

    lam: float
    C: float
    gamma: float = 0.0
    w_diam: float = 0.0

    def __post_init__(self):
        for name in ("lam", "C", "gamma", "w_diam"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        for name in ("C", "gamma", "w_diam"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


def _em1x(x: float) -> float:
    """e^x - 1 - x, stable near zero."""
    if abs(x) < 1e-2:
        return x * x / 2.0 * (1.0 + x / 3.0 + x * x / 12.0 + x**3 / 60.0 + x**4 / 360.0)
    return math.expm1(x) - x


def _em1x2(x: float) -> float:
    """e^x - 1 - x - x^2/2, stable near zero."""
    if abs(x) < 1e-2:
        return x**3 / 6.0 * (1.0 + x / 4.0 + x * x / 20.0 + x**3 / 120.0 + x**4 / 840.0)
    return math.expm1(x) - x - x * x / 2.0


def _delta_sq_pos(eps, lam, C, gamma, W, t):
    # lambda > 0 branch; x = 3*lambda*t throughout
    x = 3.0 * lam * t
    if x > _EXP_LIMIT:
        raise OverflowError
    E = math.exp(x)
    return (
        eps * eps * E
        + 2.0 * C * C * _em1x2(x) / (27.0 * lam**4)
        + C * gamma * W * _em1x(x) / (9.0 * lam**3)
        + gamma * gamma * W * W * math.expm1(x) / (12.0 * lam * lam)
    )


def _delta_sq_neg(eps, lam, C, gamma, W, t):
    # lambda < 0 branch; x = lambda*t <= 0, so no overflow possible
    x = lam * t
    return (
        eps * eps * math.exp(x)
        - 2.0 * C * C * _em1x2(x) / lam**4
        - C * gamma * W * _em1x(x) / lam**3
        - gamma * gamma * W * W * math.expm1(x) / (4.0 * lam * lam)
    )


def _delta_sq_zero(eps, C, gamma, W, t):
    # verbatim lambda = 0 branch (bare e^t terms); selectable via the
    # "paper" mode only, not the default -- see delta()
    if t > _EXP_LIMIT:
        raise OverflowError
    return (
        eps * eps * math.exp(t)
        + 2.0 * C * C * _em1x2(t)
        + C * gamma * W * _em1x(t)
        + gamma * gamma * W * W * math.expm1(t) / 4.0
    )


def delta(
    eps: float,
    k: BoundConstants,
    t: float,
    *,
    lambda_zero_mode: str = "threshold",
    lambda_tol: float = LAMBDA_TOL,
) -> float:
    """Certified error radius delta_{eps,W}(t) for in-step time t in [0, tau].

    With ``k.gamma == k.w_diam == 0`` this reduces to the disturbance-free
    bound. The branch is selected by the sign of ``k.lam``:

    * ``threshold`` (default): lam within (-lambda_tol, lambda_tol) is rounded
      up to +lambda_tol and the lam > 0 branch is used. Any upper bound on the
      true one-sided Lipschitz constant keeps the bound valid, so rounding up
      preserves soundness.
    * ``paper``: |lam| <= lambda_tol selects the verbatim lam = 0 formula.

    Raises BoundBlowup when the result is non-finite.
    """
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if lambda_zero_mode not in ("threshold", "paper"):
        raise ValueError(f"unknown lambda_zero_mode {lambda_zero_mode!r}")

    lam, C, gamma, W = k.lam, k.C, k.gamma, k.w_diam
    try:
        if lambda_zero_mode == "paper" and abs(lam) <= lambda_tol:
            d2 = _delta_sq_zero(eps, C, gamma, W, t)
        elif lam >= lambda_tol:
            d2 = _delta_sq_pos(eps, lam, C, gamma, W, t)
        elif lam <= -lambda_tol:
            d2 = _delta_sq_neg(eps, lam, C, gamma, W, t)
        else:
            d2 = _delta_sq_pos(eps, lambda_tol, C, gamma, W, t)
    except OverflowError:
        raise BoundBlowup(
            f"certified radius overflowed (lam={lam}, C={C}, t={t})"
        ) from None
    if not math.isfinite(d2):
        raise BoundBlowup(f"certified radius is non-finite (lam={lam}, C={C}, t={t})")
    # tiny negative values can appear through cancellation at t ~ 0
    return math.sqrt(max(d2, 0.0))


def ball_inside(inner: Ball, outer: Ball) -> bool:
    """Exact geometric containment B_inner subseteq B_outer (Euclidean)."""
    if inner.dim != outer.dim:
        raise DimensionMismatch(
            f"ball dimensions differ: {inner.dim} vs {outer.dim}"
        )
    d = float(np.linalg.norm(inner.center - outer.center))
    return d + inner.radius <= outer.radius


def wrapped_difference(c1: np.ndarray, c2: np.ndarray, angle_dims=()) -> np.ndarray:
    """Componentwise c1 - c2 with angle coordinates reduced to (-pi, pi].

    Used for stroboscopic comparisons on systems with 2*pi-periodic
    coordinates, where centers drift by full turns between periods.
    """
    d = np.asarray(c1, dtype=float) - np.asarray(c2, dtype=float)
    for i in angle_dims:
        d[i] = math.remainder(d[i], 2.0 * math.pi)
    return d
