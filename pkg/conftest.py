import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from wavefield import GridSpec, gaussian  # noqa: E402

settings.register_profile('nlse', deadline=None, max_examples=100)
settings.load_profile('nlse')


@pytest.fixture
def grid():
    return GridSpec(256, 20.0)


@pytest.fixture
def fine_grid():
    return GridSpec(512, 40.0)


@pytest.fixture
def packet(grid):
    """ Normalized Gaussian, σ = 1, at rest at the origin."""
    return gaussian(grid, 0.0, 1.0, 0.0)


@pytest.fixture
def moving_packet(grid):
    return gaussian(grid, 0.0, 1.0, 1.0)


@pytest.fixture(autouse=True)
def quiet_logs(monkeypatch):
    monkeypatch.setenv('NLSE_GAUGE_LOG', 'quiet')
