"""Bundled dynamical systems: vector fields, analytic Jacobians, defaults.

Every system follows the same conventions: the state is a plain float
vector, the disturbance enters (if at all) as a scalar added to every
component, and the Jacobian is supplied analytically (verified against
finite differences in the test suite). Angle coordinates are propagated
unwrapped in R; wrapping happens only in stroboscopic comparisons and at
export for plotting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularityError

_SINGULAR_MARGIN = 1e-9


@dataclass(frozen=True)
class SystemModel:
    """A vector field f(x, w) with its Jacobian and disturbance structure.

    disturbance is "additive" (scalar w added to every component, w in
    [-w_halfwidth, w_halfwidth]) or "none". angle_dims lists state indices
    that are 2*pi-periodic.
    """

    name: str
    dim: int
    params: dict
    f: Callable[[np.ndarray, float], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    disturbance: str = "none"
    w_halfwidth: float = 0.0
    angle_dims: tuple = ()
    guard: Optional[Callable[[np.ndarray], None]] = None
    dfdw: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    default_scenario: dict = field(default_factory=dict)

    @property
    def w_diam(self) -> float:
        return 2.0 * self.w_halfwidth


@dataclass
class Scenario:
    """One experiment: a system plus all run settings."""

    system: str
    x0: np.ndarray
    eps: float
    tau: float
    k: int
    max_periods: int = 10
    w: float = 0.0
    params: dict = field(default_factory=dict)
    matrix: Optional[np.ndarray] = None
    seed: int = 0
    n_steps: Optional[int] = None
    policy: Optional["EstimationPolicy"] = None  # noqa: F821  (set by cli)
    lambda_zero_mode: str = "threshold"

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        if not self.tau > 0.0:
            raise ValueError("tau must be > 0")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.w < 0.0:
            raise ValueError("disturbance half-width must be >= 0")
        if self.max_periods < 1:
            raise ValueError("max_periods must be >= 1")


def _forced_vdp_guard(x):
    r2 = x[0] * x[0] + x[1] * x[1]
    if r2 <= _SINGULAR_MARGIN * _SINGULAR_MARGIN:
        raise SingularityError(
            "forced VdP evaluated on the x1 = x2 = 0 singular axis", point=x
        )


def forced_vdp(mu: float = 1.0, w_halfwidth: float = 0.001) -> SystemModel:
    """Forced Van der Pol system in R^3 with additive disturbance.

    In cylindrical-like coordinates u = r - 3 (r = sqrt(x1^2 + x2^2)) the
    (u, x3) pair follows a Hopf normal form with attractive cycle
    u^2 + x3^2 = mu, while the phase of (x1, x2) drifts toward theta = pi.
    The plane x2 = 0 is invariant and carries the repulsive circle around
    (3, 0, 0) and the attractive circle around (-3, 0, 0), both of radius 1
    in the x1-x3 coordinates.
    """

    def f(x, w=0.0):
        _forced_vdp_guard(x)
        x1, x2, x3 = x
        r = math.sqrt(x1 * x1 + x2 * x2)
        u = r - 3.0
        q = mu - u * u - x3 * x3
        return np.array(
            [
                x1 * u / r * q - (x2 * x2 + x1 * x3) / r + w,
                x2 * u / r * q + (x1 * x2 - x2 * x3) / r + w,
                u + mu * x3 - x3 * (u * u + x3 * x3) + w,
            ]
        )

    def jac(x):
        _forced_vdp_guard(x)
        x1, x2, x3 = x
        r = math.sqrt(x1 * x1 + x2 * x2)
        r3 = r * r * r
        u = r - 3.0
        q = mu - u * u - x3 * x3
        g = u / r
        dg1, dg2 = 3.0 * x1 / r3, 3.0 * x2 / r3
        dq1, dq2, dq3 = -2.0 * u * x1 / r, -2.0 * u * x2 / r, -2.0 * x3
        n1 = x2 * x2 + x1 * x3  # numerator of the x1 fraction
        n2 = x1 * x2 - x2 * x3
        J = np.empty((3, 3))
        J[0, 0] = g * q + x1 * (dg1 * q + g * dq1) - (x3 / r - n1 * x1 / r3)
        J[0, 1] = x1 * (dg2 * q + g * dq2) - (2.0 * x2 / r - n1 * x2 / r3)
        J[0, 2] = x1 * g * dq3 - x1 / r
        J[1, 0] = x2 * (dg1 * q + g * dq1) + (x2 / r - n2 * x1 / r3)
        J[1, 1] = g * q + x2 * (dg2 * q + g * dq2) + ((x1 - x3) / r - n2 * x2 / r3)
        J[1, 2] = x2 * g * dq3 - x2 / r
        J[2, 0] = x1 / r * (1.0 - 2.0 * x3 * u)
        J[2, 1] = x2 / r * (1.0 - 2.0 * x3 * u)
        J[2, 2] = mu - (u * u + x3 * x3) - 2.0 * x3 * x3
        return J

    return SystemModel(
        name="forced_vdp",
        dim=3,
        params={"mu": mu},
        f=f,
        jac=jac,
        disturbance="additive",
        w_halfwidth=w_halfwidth,
        guard=_forced_vdp_guard,
        default_scenario={
            "x0": [4.0, -1e-3, -4.8985872e-16],
            "eps": 0.05,
            "tau": 1e-3,
            "k": 6283,
            "max_periods": 12,
            "w": 0.001,
        },
    )


def _coupled_vdp_guard(x):
    if abs(x[2]) <= _SINGULAR_MARGIN or abs(x[3]) <= _SINGULAR_MARGIN:
        raise SingularityError(
            "coupled VdP evaluated with r1 = 0 or r2 = 0", point=x
        )


def coupled_vdp(
    alpha1: float = 1.0,
    alpha2: float = 1.0,
    beta1: float = 0.55,
    beta2: float = 0.55,
    mu: float = 0.2601,
    w_halfwidth: float = 0.0001,
) -> SystemModel:
    """Two coupled VdP oscillators in (theta1, theta2, r1, r2) coordinates.

    For mu = 0 the oscillators decouple and the product torus
    (theta1, theta2, 1, 1) is invariant. theta1 and theta2 are 2*pi-periodic
    and are propagated unwrapped.
    """

    def f(x, w=0.0):
        _coupled_vdp_guard(x)
        t1, t2, r1, r2 = x
        s12 = math.sin(t1 - t2)
        cp = math.cos(t1 + t2)
        A = math.sin(t1 + t2) - math.cos(t1 - t2)
        return np.array(
            [
                beta1 + mu * (math.cos(2 * t1) - (r2 / r1) * (s12 + cp)) + w,
                beta2 + mu * (math.cos(2 * t2) - (r1 / r2) * (-s12 + cp)) + w,
                r1 * (alpha1 - r1 * r1) + mu * (r1 * (1 - math.sin(2 * t1)) + A * r2) + w,
                r2 * (alpha2 - r2 * r2) + mu * (r2 * (1 - math.sin(2 * t2)) + A * r1) + w,
            ]
        )

    def jac(x):
        _coupled_vdp_guard(x)
        t1, t2, r1, r2 = x
        s12, c12 = math.sin(t1 - t2), math.cos(t1 - t2)
        sp, cp = math.sin(t1 + t2), math.cos(t1 + t2)
        A = sp - c12
        J = np.empty((4, 4))
        J[0, 0] = mu * (-2 * math.sin(2 * t1) - (r2 / r1) * (c12 - sp))
        J[0, 1] = mu * (r2 / r1) * (c12 + sp)
        J[0, 2] = mu * (r2 / (r1 * r1)) * (s12 + cp)
        J[0, 3] = -mu * (s12 + cp) / r1
        J[1, 0] = mu * (r1 / r2) * (c12 + sp)
        J[1, 1] = mu * (-2 * math.sin(2 * t2) - (r1 / r2) * (c12 - sp))
        J[1, 2] = -mu * (-s12 + cp) / r2
        J[1, 3] = mu * (r1 / (r2 * r2)) * (-s12 + cp)
        J[2, 0] = mu * (-2 * r1 * math.cos(2 * t1) + r2 * (cp + s12))
        J[2, 1] = mu * r2 * (cp - s12)
        J[2, 2] = alpha1 - 3 * r1 * r1 + mu * (1 - math.sin(2 * t1))
        J[2, 3] = mu * A
        J[3, 0] = mu * r1 * (cp + s12)
        J[3, 1] = mu * (-2 * r2 * math.cos(2 * t2) + r1 * (cp - s12))
        J[3, 2] = mu * A
        J[3, 3] = alpha2 - 3 * r2 * r2 + mu * (1 - math.sin(2 * t2))
        return J

    return SystemModel(
        name="coupled_vdp",
        dim=4,
        params={
            "alpha1": alpha1,
            "alpha2": alpha2,
            "beta1": beta1,
            "beta2": beta2,
            "mu": mu,
        },
        f=f,
        jac=jac,
        disturbance="additive",
        w_halfwidth=w_halfwidth,
        angle_dims=(0, 1),
        guard=_coupled_vdp_guard,
        default_scenario={
            "x0": [0.0, 3.14159265, 1.05980274, 1.02028354],
            "eps": 0.1,
            "tau": 1e-3,
            "k": 11425,
            "max_periods": 8,
            "w": 0.0001,
        },
    )


#: the ten source points listed for the coupled-VdP cover experiment
COUPLED_VDP_SOURCES = [
    [0.0, 3.14159265, 1.05980274, 1.02028354],
    [0.62831853, 3.76991118, 0.95715177, 1.08632695],
    [1.25663706, 4.39822972, 1.03960697, 0.93217529],
    [1.88495559, 5.02654825, 0.99657, 1.09545089],
    [2.51327412, 5.65486678, 1.02811851, 1.0178553],
    [3.14159265, 0.0, 1.08476381, 0.97121437],
    [3.76991118, 0.62831853, 0.97369993, 0.93966289],
    [4.39822972, 1.25663706, 1.05513594, 1.00555761],
    [5.02654825, 1.88495559, 0.98407245, 1.09722914],
    [5.65486678, 2.51327412, 0.98484401, 0.93636707],
]


def linear_system(A, disturbance: bool = False, w_halfwidth: float = 0.0) -> SystemModel:
    """f(x, w) = A x (+ w * ones when disturbance is enabled).

    Used as an oracle system: the closed-form solution e^{At} x0 is available
    to the test suite through scipy.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("A must be finite")
    n = A.shape[0]
    ones = np.ones(n)

    def f(x, w=0.0):
        return A @ x + w * ones if w else A @ x

    return SystemModel(
        name="linear",
        dim=n,
        params={},
        f=f,
        jac=lambda x: A,
        disturbance="additive" if disturbance else "none",
        w_halfwidth=w_halfwidth,
    )


def build_system(name: str, params: dict | None = None, matrix=None,
                 w_halfwidth: float | None = None) -> SystemModel:
    """Construct a bundled system by name, with parameter overrides."""
    params = dict(params or {})
    if name == "forced_vdp":
        kw = {"mu": params.pop("mu", 1.0)}
    elif name == "coupled_vdp":
        kw = {
            "alpha1": params.pop("alpha1", 1.0),
            "alpha2": params.pop("alpha2", 1.0),
            "beta1": params.pop("beta1", 0.55),
            "beta2": params.pop("beta2", 0.55),
            "mu": params.pop("mu", 0.2601),
        }
    elif name == "linear":
        if matrix is None:
            raise ValueError("linear system requires a matrix")
        if params:
            raise ValueError(f"unknown linear-system parameters: {sorted(params)}")
        return linear_system(
            matrix,
            disturbance=w_halfwidth is not None and w_halfwidth > 0,
            w_halfwidth=w_halfwidth or 0.0,
        )
    else:
        raise ValueError(f"unknown system {name!r}")
    if params:
        raise ValueError(f"unknown {name} parameters: {sorted(params)}")
    if w_halfwidth is not None:
        kw["w_halfwidth"] = w_halfwidth
    return {"forced_vdp": forced_vdp, "coupled_vdp": coupled_vdp}[name](**kw)
