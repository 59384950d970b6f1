"""
Pytest configuration: adds src/ to the path so all modules can be imported.
"""

import sys
import os

import pytest

# Add the src directory so packages can be imported without installing
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from common.streams import RandomStream  # noqa: E402
from series_engine import SeriesParams  # noqa: E402


@pytest.fixture
def stream():
    """Fixed random stream shared by stochastic tests"""
    return RandomStream(master_seed=20240611, stream_index=0)


@pytest.fixture
def series_params():
    return SeriesParams()


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep the default worker count independent of the host environment"""
    monkeypatch.setenv("ISOPERIM_WORKERS", "1")
