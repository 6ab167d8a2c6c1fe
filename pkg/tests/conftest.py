import math

import numpy as np
import pytest

from cstar_comp.fuchsian import default_group
from cstar_comp.mobius import MobiusTransform

SQRT2 = math.sqrt(2.0)


@pytest.fixture(scope="session")
def group():
    return default_group()


@pytest.fixture(scope="session")
def g1():
    return MobiusTransform(SQRT2, 1.0)


@pytest.fixture(scope="session")
def g2():
    return MobiusTransform(SQRT2, 1j)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def disk_points(rng, count, rmax=0.95):
    r = rmax * np.sqrt(rng.uniform(size=count))
    return r * np.exp(2j * np.pi * rng.uniform(size=count))
