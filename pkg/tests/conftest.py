"""Shared fixtures: small consistent configs and backend parametrization."""

import dataclasses

import numpy as np
import pytest

from uralink import config as config_mod
from uralink import kernels


def pytest_addoption(parser):
    parser.addoption("--skip-acceptance", action="store_true", default=False,
                     help="skip the long-running acceptance criteria")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test once per available kernel backend."""
    return request.param


@pytest.fixture
def tiny_config():
    """Smallest consistent scenario: one user, two chunks."""
    return config_mod.profile("toy-single")


@pytest.fixture
def multi_config():
    """Sixteen users over four chunks."""
    return config_mod.profile("toy-multi")


@pytest.fixture
def dense_config():
    """Overloaded single-chunk scenario with power division enabled."""
    return dataclasses.replace(config_mod.profile("toy-dense"),
                               pd_enabled=True)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
