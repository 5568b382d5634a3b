import logging

import numpy as np
import pytest

import gammakit
from gammakit.core import Budget
from gammakit.fixtures import kv_triple

LOG = logging.getLogger(__name__)


@pytest.fixture(params=[0, 4], ids=["serial", "threaded"])
def runtime(request):
    """parameterized runtime fixture: runs the test once serially and once on a worker pool"""
    threads = gammakit.init(request.param)
    yield threads
    gammakit.shutdown()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def budget() -> Budget:
    """a reduced falsification budget that keeps the battery tests fast"""
    return Budget(max_degree=3, random_polys=8, grid=32, refine_iters=2)


@pytest.fixture(scope="session")
def kv():
    return kv_triple()
