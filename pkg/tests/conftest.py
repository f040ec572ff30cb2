import math

import numpy as np
import pytest

from spectra_invert.shapes import exponential, harmonic, sech_squared, \
    shifted_power


@pytest.fixture(scope="session")
def sech2_shape():
    return sech_squared()


@pytest.fixture(scope="session")
def exp_shape():
    return exponential()


@pytest.fixture(scope="session")
def harmonic_shape():
    return harmonic()


def sech2_energy(v: float) -> float:
    """Closed-form ground energy of -d2/dx2 - v sech^2(x)."""
    return -(math.sqrt(v + 0.25) - 0.5) ** 2


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
