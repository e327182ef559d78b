"""Per-region estimation of the bound constants lambda, C and gamma.

The one-sided Lipschitz constant over a region is bounded by the maximum
logarithmic norm mu2 of the Jacobian there (largest eigenvalue of the
symmetric part). We estimate that maximum by sampling a grid plus random
interior points, then inflate by an explicit safety policy. The result is
therefore guaranteed only up to sampled-constant validity: a certificate
holds conditional on the sampled maxima actually dominating the region.

lambda is always rounded up (toward +inf); C and gamma are rounded up in
magnitude, so any inflated estimate that dominates the true value keeps the
error bound valid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .geometry import BoundConstants
from .systems import SystemModel


@dataclass(frozen=True)
class BoxRegion:
    """An axis-aligned box [lo, hi] in state space."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo and hi must be vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("region bounds must be finite")
        if np.any(lo > hi):
            raise ValueError("lo must be <= hi componentwise")

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def contains(self, other: "BoxRegion") -> bool:
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))


@dataclass(frozen=True)
class EstimationPolicy:
    """Sampling density and safety margins for constant estimation."""

    samples_grid: int = 2
    samples_random: int = 5
    seed: int = 0
    safety_factor: float = 1.05
    safety_margin: float = 1e-6

    def __post_init__(self):
        if self.samples_grid < 2:
            raise ValueError("samples_grid must be >= 2")
        if self.samples_random < 0:
            raise ValueError("samples_random must be >= 0")
        if self.safety_factor < 1.0:
            raise ValueError("safety_factor must be >= 1")
        if self.safety_margin < 0.0:
            raise ValueError("safety_margin must be >= 0")


@dataclass(frozen=True)
class LocalConstants:
    """Constants certified on one region, attached to one integration step."""

    region: BoxRegion
    k: BoundConstants
    step_index: int


def sample_points(r: BoxRegion, p: EstimationPolicy) -> np.ndarray:
    """Deterministic sample of r: full grid plus seeded uniform points."""
    axes = [np.linspace(r.lo[i], r.hi[i], p.samples_grid) for i in range(r.dim)]
    grid = np.array(list(itertools.product(*axes)))
    if p.samples_random:
        rng = np.random.default_rng(p.seed)
        u = rng.random((p.samples_random, r.dim))
        grid = np.vstack([grid, r.lo + u * (r.hi - r.lo)])
    return grid


def _sweep(sys: SystemModel, r: BoxRegion, p: EstimationPolicy):
    """Max of mu2(J), ||J||_2 and ||f|| over the sample (raw, uninflated)."""
    lam = -math.inf
    L = 0.0
    fmax = 0.0
    for x in sample_points(r, p):
        J = sys.jac(x)
        if not np.all(np.isfinite(J)):
            raise EstimationError("non-finite Jacobian during estimation", point=x)
        try:
            lam = max(lam, float(np.linalg.eigvalsh((J + J.T) / 2.0)[-1]))
            L = max(L, float(np.linalg.norm(J, 2)))
        except np.linalg.LinAlgError as exc:
            raise EstimationError(f"eigen-solver failed: {exc}", point=x) from exc
        fmax = max(fmax, float(np.linalg.norm(sys.f(x, 0.0))))
    return lam, L, fmax


def _inflate_lambda(lam: float, p: EstimationPolicy) -> float:
    # round toward +inf: grow positive estimates, shrink negative magnitudes
    lam = lam * p.safety_factor if lam >= 0.0 else lam / p.safety_factor
    return lam + p.safety_margin


def estimate_lambda(sys: SystemModel, r: BoxRegion, p: EstimationPolicy) -> float:
    """Upper estimate of the one-sided Lipschitz constant on r."""
    lam, _, _ = _sweep(sys, r, p)
    return _inflate_lambda(lam, p)


def estimate_C(sys: SystemModel, r: BoxRegion, p: EstimationPolicy) -> float:
    """Upper estimate of C = L * sup ||f||, L the Lipschitz constant on r."""
    _, L, fmax = _sweep(sys, r, p)
    return L * fmax * p.safety_factor


def estimate_gamma(sys: SystemModel, r: BoxRegion, p: EstimationPolicy) -> float:
    """Disturbance coupling constant on r.

    Additive scalar disturbance in every component gives gamma = sqrt(n)
    exactly (Cauchy-Schwarz against the all-ones direction); systems with a
    declared dfdw are sampled like the other constants.
    """
    if sys.disturbance == "none":
        return 0.0
    if sys.dfdw is None:
        return math.sqrt(sys.dim)
    g = 0.0
    for x in sample_points(r, p):
        for w in np.linspace(-sys.w_halfwidth, sys.w_halfwidth, 3):
            g = max(g, float(np.linalg.norm(np.atleast_2d(sys.dfdw(x, w)), 2)))
    return g * p.safety_factor


def estimate_constants(
    sys: SystemModel, r: BoxRegion, p: EstimationPolicy, w_diam: float = 0.0
) -> BoundConstants:
    """All constants from a single sample sweep (shared by the integrator)."""
    lam, L, fmax = _sweep(sys, r, p)
    return BoundConstants(
        lam=_inflate_lambda(lam, p),
        C=L * fmax * p.safety_factor,
        gamma=estimate_gamma(sys, r, p) if w_diam > 0.0 else 0.0,
        w_diam=w_diam,
    )
