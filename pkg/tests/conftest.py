"""Shared test utilities."""

import numpy as np
import pytest


def ks_uniform(u: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of a sample against Uniform(0,1)."""
    x = np.sort(np.asarray(u, dtype=float))
    n = x.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - x), np.max(x - (grid - 1.0 / n))))


def ks_bound(n: int) -> float:
    """1% critical value of the one-sample KS statistic."""
    return 1.63 / np.sqrt(n)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=np.array([987654321, 0], dtype=np.uint64)))
