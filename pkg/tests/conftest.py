import numpy as np
import pytest

from ifdsim.domain import PeriodicDomain
from ifdsim.prior import CorrelationKernel, assemble_operators


@pytest.fixture(scope="session")
def domain64():
    return PeriodicDomain(64.0, 64, 16)


@pytest.fixture(scope="session")
def kernel05(domain64):
    return CorrelationKernel(((1.0, 0.5),), domain64, images=8)


@pytest.fixture(scope="session")
def ops64(kernel05, domain64):
    return assemble_operators(kernel05, domain64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian_modes(rng, n, scale=1.0, zero_nyquist=True):
    """Random mode vector of a real band-limited field (fft bin order)."""
    field = rng.standard_normal(n) * scale
    modes = np.fft.ifft(field)
    if zero_nyquist and n % 2 == 0:
        modes[n // 2] = 0.0
    return modes
