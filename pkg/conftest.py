import pytest
import numpy as np

from src.residues import primitive_characters

SMALL_PRIMES = [3, 5, 7, 11, 13]


@pytest.fixture
def small_primes():
    return list(SMALL_PRIMES)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def quadratic5():
    # Legendre symbol mod 5
    for chi in primitive_characters(5):
        if chi.order == 2:
            return chi
