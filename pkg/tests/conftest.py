import pytest

from tfqkd.config import ProtocolConfig
from tfqkd.kernels import available_backends


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    return available_backends()[request.param]


@pytest.fixture
def base_config():
    return ProtocolConfig(N=1e12, P_d=1e-7)


@pytest.fixture
def ideal_config():
    """No dark counts, perfect alignment."""
    return ProtocolConfig(N=1e12, P_d=0.0, alpha=0.0, beta=0.0)
