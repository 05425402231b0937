import numpy as np
import pytest

from iqpforge import backends


@pytest.fixture(params=backends.available_backends())
def backend(request):
    """Run the decorated test once per kernel backend, restoring the default."""
    previous = backends.active_backend()
    backends.set_backend(request.param)
    yield request.param
    backends.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
