import numpy as np
import pytest

from torus_lasso import EstimationPolicy, forced_vdp, linear_system


@pytest.fixture
def policy():
    return EstimationPolicy()


@pytest.fixture
def vdp():
    return forced_vdp()


@pytest.fixture
def contraction():
    """x' = -x in R^2, the simplest exactly solvable contracting system."""
    return linear_system([[-1.0, 0.0], [0.0, -1.0]])


@pytest.fixture
def spiral():
    return linear_system([[-0.2, 1.0], [-1.0, -0.2]])


@pytest.fixture
def vdp_x0():
    return np.array([4.0, -1e-3, -4.8985872e-16])
