import numpy as np
import pytest

from fibred.example import build_example


@pytest.fixture(scope="session")
def example():
    """Default example: r=0.2, a=0.8, alpha=0.0618..., 2048 cover samples."""
    return build_example()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
