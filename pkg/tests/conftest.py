import numpy as np
import pytest

from geomquad import SimConfig, build_case1, build_case2
from geomquad.sim import run


@pytest.fixture(scope="session")
def case1_result():
    """Shared Case 1 run (upside-down hover recovery, 10 s, dt = 1e-3)."""
    return run(build_case1(), SimConfig())


@pytest.fixture(scope="session")
def case2_result():
    """Shared Case 2 run (five-segment maneuver with two flips, 12 s)."""
    return run(build_case2(), SimConfig())


def random_rotation(rng, max_angle=np.pi):
    from geomquad.so3 import exp_so3

    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return exp_so3(axis * rng.uniform(0.0, max_angle))
