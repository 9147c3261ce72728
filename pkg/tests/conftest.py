import numpy as np
import pytest
from scipy.stats import special_ortho_group, unitary_group

from spinsteer.linalg import SX, SY, SZ


def random_su2_algebra(rng, scale=1.0):
    a = rng.normal(size=3) * scale
    return -1j * (a[0] * SX + a[1] * SY + a[2] * SZ)


def haar_su(n, rng):
    u = unitary_group.rvs(n, random_state=rng)
    return u / np.linalg.det(u) ** (1 / n)


def haar_so3(rng):
    return special_ortho_group.rvs(3, random_state=rng)


def random_skew3(rng):
    a = rng.normal(size=(3, 3))
    return a - a.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
