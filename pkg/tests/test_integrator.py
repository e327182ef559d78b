"""Tube propagation: soundness against exact/high-order reference solutions."""
import math

import numpy as np
import pytest
from scipy.linalg import expm

from torus_lasso import (
    Ball,
    euler_step,
    extend,
    linear_system,
    propagate,
)


def _rk4_batch(sys, X, tau, n_steps, w=0.0):
    """Vectorized classical RK4 on a batch of states (reference solver)."""

    def F(X):
        return np.array([sys.f(x, w) for x in X])

    for _ in range(n_steps):
        k1 = F(X)
        k2 = F(X + tau / 2 * k1)
        k3 = F(X + tau / 2 * k2)
        k4 = F(X + tau * k3)
        X = X + tau / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return X


def test_euler_step_formula(contraction):
    x = np.array([2.0, -1.0])
    assert euler_step(contraction, x, 0.1) == pytest.approx(x * 0.9)
    with pytest.raises(ValueError):
        euler_step(contraction, x, 0.0)


def test_propagate_structure(contraction, policy):
    tube = propagate(contraction, Ball(0.0, np.array([1.0, 0.0]), 0.1), 0.01, 50, policy)
    assert tube.n_steps == 50
    assert len(tube.balls) == 51
    assert len(tube.constants) == 50
    assert tube.blowup is None
    assert tube.times[-1] == pytest.approx(0.5)
    # centers are the plain Euler iterates
    assert tube.centers[1] == pytest.approx(np.array([0.99, 0.0]))


def test_extend_appends_in_place(contraction, policy):
    tube = propagate(contraction, Ball(0.0, np.array([1.0, 0.0]), 0.1), 0.01, 10, policy)
    extend(contraction, tube, 15, policy)
    assert tube.n_steps == 25
    # one continuous propagation gives the identical tube
    whole = propagate(contraction, Ball(0.0, np.array([1.0, 0.0]), 0.1), 0.01, 25, policy)
    assert np.array_equal(tube.centers, whole.centers)
    assert np.array_equal(tube.radii, whole.radii)


@pytest.mark.parametrize("A", [
    [[-1.0, 0.0], [0.0, -1.0]],
    [[-0.2, 1.0], [-1.0, -0.2]],
    [[0.3, 0.0], [0.0, -1.0]],  # expanding direction: lam > 0 branch
])
def test_linear_soundness_exact_solutions(A, policy):
    """Exact solutions from the initial ball must stay inside the tube balls."""
    A = np.array(A)
    sys = linear_system(A)
    x0 = np.array([1.0, 0.5])
    eps = 0.2
    tau = 0.01
    n = 200
    tube = propagate(sys, Ball(0.0, x0, eps), tau, n, policy)
    assert tube.blowup is None
    rng = np.random.default_rng(7)
    # random exact starts on and inside the eps-sphere
    dirs = rng.normal(size=(64, 2))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    starts = x0 + dirs * eps * rng.uniform(0.0, 1.0, size=(64, 1)) ** 0.5
    starts[:8] = x0 + dirs[:8] * eps  # include boundary points
    for i in (1, 10, 50, 100, 200):
        Phi = expm(A * i * tau)
        exact = starts @ Phi.T
        d = np.linalg.norm(exact - tube.centers[i], axis=1)
        assert np.all(d <= tube.radii[i] + 1e-12), f"escape at step {i}"


def test_linear_soundness_with_disturbance(policy):
    """Constant-disturbance extremal solutions must stay enclosed."""
    A = np.array([[-1.0, 0.2], [-0.2, -1.0]])
    wh = 0.05
    sys = linear_system(A, disturbance=True, w_halfwidth=wh)
    x0 = np.array([1.0, 0.0])
    eps = 0.1
    tau = 0.005
    n = 400
    tube = propagate(sys, Ball(0.0, x0, eps), tau, n, policy)
    assert tube.blowup is None
    ones = np.ones(2)
    Ainv = np.linalg.inv(A)
    for w in (-wh, wh, 0.37 * wh):
        # exact solution of x' = Ax + w*1: x(t) = e^{At}(x0 + A^{-1}w1) - A^{-1}w1
        shift = Ainv @ (w * ones)
        for i in (1, 40, 200, 400):
            t = i * tau
            exact = expm(A * t) @ (x0 + shift) - shift
            d = float(np.linalg.norm(exact - tube.centers[i]))
            assert d <= tube.radii[i] + 1e-12, f"w={w} escaped at step {i}"


def test_vdp_soundness_short_horizon(vdp, vdp_x0, policy):
    """Monte Carlo reference trajectories stay inside the forced-VdP tube."""
    eps = 0.05
    tau = 1e-3
    n = 800
    tube = propagate(vdp, Ball(0.0, vdp_x0, eps), tau, n, policy, w_diam=0.0)
    assert tube.blowup is None
    rng = np.random.default_rng(11)
    dirs = rng.normal(size=(40, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    starts = vdp_x0 + dirs * eps * rng.uniform(0.0, 1.0, size=(40, 1)) ** (1 / 3)
    # RK4 at tau/5 is a vastly more accurate reference than the Euler centers
    X = starts.copy()
    for i in (200, 400, 800):
        prev = 0 if i == 200 else i_prev
        X = _rk4_batch(vdp, X, tau / 5.0, (i - prev) * 5)
        i_prev = i
        d = np.linalg.norm(X - tube.centers[i], axis=1)
        assert np.all(d <= tube.radii[i] + 1e-12), f"escape at step {i}"


def test_vdp_disturbed_soundness(vdp, vdp_x0, policy):
    """Constant extremal disturbances stay inside the disturbed tube."""
    eps = 0.05
    tau = 1e-3
    n = 500
    tube = propagate(vdp, Ball(0.0, vdp_x0, eps), tau, n, policy, w_diam=0.002)
    assert tube.blowup is None
    for w in (-0.001, 0.001):
        x = vdp_x0.copy().reshape(1, 3)
        x = _rk4_batch(vdp, x, tau / 5.0, n * 5, w=w)
        d = float(np.linalg.norm(x[0] - tube.centers[n]))
        assert d <= tube.radii[n] + 1e-12


def test_disturbance_widens_the_tube(vdp, vdp_x0, policy):
    b0 = Ball(0.0, vdp_x0, 0.05)
    free = propagate(vdp, b0, 1e-3, 200, policy, w_diam=0.0)
    dist = propagate(vdp, b0, 1e-3, 200, policy, w_diam=0.002)
    assert np.array_equal(free.centers, dist.centers)
    assert np.all(dist.radii[1:] > free.radii[1:])


def test_region_certifies_each_step(vdp, vdp_x0, policy):
    tube = propagate(vdp, Ball(0.0, vdp_x0, 0.05), 1e-3, 100, policy)
    for lc, b0, b1 in zip(tube.constants, tube.balls, tube.balls[1:]):
        # both endpoint balls fit inside the certified region
        for b in (b0, b1):
            assert np.all(b.center - b.radius >= lc.region.lo - 1e-12)
            assert np.all(b.center + b.radius <= lc.region.hi + 1e-12)


def test_blowup_truncates_tube(policy):
    # strongly expanding system: the radius overflows quickly but the tube
    # must survive, truncated, with the diagnosis recorded
    sys = linear_system([[80.0, 0.0], [0.0, 80.0]])
    tube = propagate(sys, Ball(0.0, np.array([1.0, 0.0]), 0.5), 3.0, 100, policy)
    assert tube.blowup is not None
    assert tube.blowup_reason
    assert len(tube.balls) == tube.blowup + 1
    assert all(math.isfinite(b.radius) for b in tube.balls)


def test_enclosure_failure_truncates_tube(policy):
    # huge per-step growth: no finite inflation certifies the step, and the
    # tube is truncated at the uncertifiable step
    sys = linear_system([[200.0]])
    tube = propagate(sys, Ball(0.0, np.array([1.0]), 0.9), 0.05, 3, policy, max_retries=2)
    assert tube.blowup == 0
    assert "enclosure" in tube.blowup_reason


def test_propagate_input_validation(contraction, policy):
    with pytest.raises(ValueError):
        propagate(contraction, Ball(0.0, np.zeros(2), 0.1), 0.01, 0, policy)


def test_tube_determinism(vdp, vdp_x0, policy):
    a = propagate(vdp, Ball(0.0, vdp_x0, 0.05), 1e-3, 120, policy, w_diam=0.002)
    b = propagate(vdp, Ball(0.0, vdp_x0, 0.05), 1e-3, 120, policy, w_diam=0.002)
    assert np.array_equal(a.centers, b.centers)
    assert np.array_equal(a.radii, b.radii)
