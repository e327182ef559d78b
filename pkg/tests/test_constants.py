"""Constant estimation: frozen regressions, dominance, sampling, policy."""
import itertools
import math

import numpy as np
import pytest

from torus_lasso import (
    BoxRegion,
    EstimationError,
    EstimationPolicy,
    estimate_C,
    estimate_constants,
    estimate_gamma,
    estimate_lambda,
    linear_system,
)
from torus_lasso.constants import sample_points

# Regression values frozen from a dense 50^3 sweep of the analytic Jacobian
# (raw maxima before safety inflation).
DENSE_A = {"lam": 1.0671791439, "C": 3.3895788633}
DENSE_B = {"lam": 1.0518073009, "C": 3.0920390844}

REGION_A = BoxRegion([3.9, -0.1, -0.1], [4.1, 0.1, 0.1])
REGION_B = BoxRegion(
    np.array([4.0, -1e-3, -4.8985872e-16]) - 0.075,
    np.array([4.0, -1e-3, -4.8985872e-16]) + 0.075,
)


@pytest.mark.parametrize("region,dense", [(REGION_A, DENSE_A), (REGION_B, DENSE_B)])
def test_estimates_dominate_dense_sweep(region, dense, vdp, policy):
    lam = estimate_lambda(vdp, region, policy)
    C = estimate_C(vdp, region, policy)
    # the inflated estimate must sit above the dense raw maximum ...
    assert lam >= dense["lam"]
    assert C >= dense["C"]
    # ... but not be wildly conservative (inflation is 5% + margin)
    assert lam <= dense["lam"] * 1.10
    assert C <= dense["C"] * 1.10


def test_frozen_regression_values(vdp, policy):
    k = estimate_constants(vdp, REGION_A, policy, w_diam=0.002)
    assert k.lam == pytest.approx(1.1196732962, rel=1e-8)
    assert k.C == pytest.approx(3.5590578064, rel=1e-8)
    assert k.gamma == pytest.approx(math.sqrt(3.0), rel=1e-12)
    assert k.w_diam == 0.002


def test_linear_constants_are_exact():
    # for f = A x, mu2 and L are state-independent, so sampling is exact up
    # to the safety inflation
    A = np.array([[-1.0, 0.5], [0.5, -2.0]])
    sys = linear_system(A)
    r = BoxRegion([-1.0, -1.0], [1.0, 1.0])
    p = EstimationPolicy(safety_factor=1.0, safety_margin=0.0)
    mu2 = float(np.linalg.eigvalsh((A + A.T) / 2.0)[-1])
    assert estimate_lambda(sys, r, p) == pytest.approx(mu2, rel=1e-12)
    L = float(np.linalg.norm(A, 2))
    fmax = max(
        float(np.linalg.norm(A @ np.array(c)))
        for c in itertools.product([-1.0, 1.0], repeat=2)
    )
    assert estimate_C(sys, r, p) == pytest.approx(L * fmax, rel=1e-12)


def test_lambda_inflation_rounds_toward_plus_infinity():
    sys = linear_system([[-2.0, 0.0], [0.0, -3.0]])
    r = BoxRegion([-1.0, -1.0], [1.0, 1.0])
    p = EstimationPolicy(safety_factor=1.05, safety_margin=0.0)
    # raw mu2 = -2; a sound upper bound shrinks the magnitude: -2/1.05
    assert estimate_lambda(sys, r, p) == pytest.approx(-2.0 / 1.05, rel=1e-12)
    sys_pos = linear_system([[2.0, 0.0], [0.0, -3.0]])
    assert estimate_lambda(sys_pos, r, p) == pytest.approx(2.0 * 1.05, rel=1e-12)


def test_gamma_additive_is_sqrt_n(vdp, policy):
    r = BoxRegion([3.9, -0.1, -0.1], [4.1, 0.1, 0.1])
    assert estimate_gamma(vdp, r, policy) == pytest.approx(math.sqrt(3.0))
    lin = linear_system([[-1.0]])
    assert estimate_gamma(lin, BoxRegion([0.0], [1.0]), policy) == 0.0


def test_sample_points_deterministic_and_inside():
    r = BoxRegion([0.0, -1.0], [2.0, 1.0])
    p = EstimationPolicy(samples_grid=3, samples_random=7, seed=42)
    pts1 = sample_points(r, p)
    pts2 = sample_points(r, p)
    assert np.array_equal(pts1, pts2)
    assert pts1.shape == (9 + 7, 2)
    assert np.all(pts1 >= r.lo) and np.all(pts1 <= r.hi)
    # grid corners are always present
    assert any(np.array_equal(q, [0.0, -1.0]) for q in pts1)
    assert any(np.array_equal(q, [2.0, 1.0]) for q in pts1)


def test_seed_changes_random_points_only():
    r = BoxRegion([0.0], [1.0])
    p1 = EstimationPolicy(samples_grid=2, samples_random=4, seed=1)
    p2 = EstimationPolicy(samples_grid=2, samples_random=4, seed=2)
    a, b = sample_points(r, p1), sample_points(r, p2)
    assert np.array_equal(a[:2], b[:2])
    assert not np.array_equal(a[2:], b[2:])


def test_estimation_error_on_singular_region(vdp, policy):
    # a region whose samples hit the singular axis x1 = x2 = 0 cannot be
    # certified (degenerate in x1, x2 so the grid lands on the axis exactly)
    r = BoxRegion([0.0, 0.0, -0.5], [0.0, 0.0, 0.5])
    with pytest.raises(Exception) as exc_info:
        estimate_lambda(vdp, r, policy)
    assert exc_info.type.__name__ in ("SingularityError", "EstimationError")


def test_region_validation():
    with pytest.raises(ValueError):
        BoxRegion([1.0], [0.0])
    with pytest.raises(ValueError):
        BoxRegion([0.0], [np.inf])
    with pytest.raises(ValueError):
        BoxRegion([[0.0]], [[1.0]])
    big = BoxRegion([0.0, 0.0], [2.0, 2.0])
    small = BoxRegion([0.5, 0.5], [1.5, 1.5])
    assert big.contains(small)
    assert not small.contains(big)


def test_policy_validation():
    with pytest.raises(ValueError):
        EstimationPolicy(samples_grid=1)
    with pytest.raises(ValueError):
        EstimationPolicy(samples_random=-1)
    with pytest.raises(ValueError):
        EstimationPolicy(safety_factor=0.99)
    with pytest.raises(ValueError):
        EstimationPolicy(safety_margin=-1e-9)
