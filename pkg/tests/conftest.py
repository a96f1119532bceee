import numpy as np
import pytest

from hypercross.rng import master_rng


@pytest.fixture
def rng():
    return master_rng(0xBEEF)


def gaussian_cloud(seed: int, n: int, d: int, spread: float = 1.0) -> np.ndarray:
    return master_rng(seed).standard_normal((n, d)) * spread
