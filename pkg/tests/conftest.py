import numpy as np
import pytest

from plasnet import NetworkConfig, QDConfig


def _make_config(n=2, g_inout=0.5, gamma0=0.1, J=0.3, gamma=0.001, d1=0.0, d2=0.0):
    return NetworkConfig(
        n=n,
        g_inout=g_inout,
        gamma0=gamma0,
        qd1=QDConfig(J=J, gamma=gamma, delta=d1),
        qd2=QDConfig(J=J, gamma=gamma, delta=d2),
    )


@pytest.fixture
def make_config():
    """Factory for two-arm configs; defaults match the CLI defaults."""
    return _make_config


@pytest.fixture
def default_config():
    return _make_config()


@pytest.fixture
def default_qd():
    return QDConfig(J=0.3, gamma=0.001, delta=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
