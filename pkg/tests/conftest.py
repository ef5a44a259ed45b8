import numpy as np
import pytest

from qfield import _backend


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["python", "native"])
def backend(request):
    if request.param == "native" and not _backend.native_available():
        pytest.skip("compiled kernels not built")
    return request.param
