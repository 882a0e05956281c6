import numpy as np
import pytest
from scipy.linalg import subspace_angles

from src.models.liegroup import make_group
from src.utils.seeding import make_rng


@pytest.fixture
def rng():
    return make_rng(1234, "tests")


@pytest.fixture
def so2():
    return make_group("SO", 2)


@pytest.fixture
def so3():
    return make_group("SO", 3)


@pytest.fixture
def se2():
    return make_group("SE", 2)


@pytest.fixture
def se3():
    return make_group("SE", 3)


@pytest.fixture
def max_angle():
    """Largest principal angle between two column spans, in radians."""
    def angle(A, B):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return float(np.max(subspace_angles(A, B)))
    return angle
