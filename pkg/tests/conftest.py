import numpy as np
import pytest

from degvrp import Instance, Vehicle
from degvrp.reference import reference_instance


def random_instance(rng, n=None, k=None, lo=1.0, hi=30.0, soc=(60.0, 100.0)):
    n = int(rng.integers(4, 9)) if n is None else n
    k = int(rng.integers(1, 4)) if k is None else k
    k = min(k, n - 1)
    cost = rng.uniform(lo, hi, (n, n))
    energy = rng.uniform(lo, hi, (n, n))
    np.fill_diagonal(cost, 0)
    np.fill_diagonal(energy, 0)
    vehicles = [Vehicle(f"v{i}", float(rng.uniform(*soc))) for i in range(k)]
    return Instance(cost, energy, vehicles)


def line_instance(n, soc=100.0, k=1, c=5.0, e=10.0):
    cost = np.full((n, n), c)
    energy = np.full((n, n), e)
    np.fill_diagonal(cost, 0)
    np.fill_diagonal(energy, 0)
    return Instance(cost, energy, [Vehicle(f"v{i}", soc) for i in range(k)])


@pytest.fixture(scope="session")
def reference():
    return reference_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
