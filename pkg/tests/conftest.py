import numpy as np
import pytest

from src.chart.grid import build_chart


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def chart():
    """Flat n=2 chart, N=16."""
    return build_chart(2, 16)


@pytest.fixture
def small_chart():
    """Flat n=2 chart, N=8, for solves."""
    return build_chart(2, 8)


@pytest.fixture
def line_chart():
    """Flat n=1 chart, N=32."""
    return build_chart(1, 32)
