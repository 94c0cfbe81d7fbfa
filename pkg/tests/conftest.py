import numpy as np
import pytest

from voronoicur.analysis.generators import SnnConfig, gen_snn


def orthonormal(rng, n, r):
    """Seeded matrix with orthonormal columns."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Q


def low_rank(rng, m, n, rank):
    """Seeded exact-rank product ``X @ Y.T``."""
    return rng.standard_normal((m, rank)) @ rng.standard_normal((n, rank)).T


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture(scope="session")
def snn_desk():
    """200 x 200 sparse nonnegative instance used across the suites."""
    return gen_snn(SnnConfig(200, 200, 20, 0.05, seed=3))


@pytest.fixture(scope="session")
def snn_small():
    """80 x 80 instance for quick pipeline and CLI runs."""
    return gen_snn(SnnConfig(80, 80, 8, 0.1, seed=7))
