import numpy as np
import pytest

from symmod.sampler import ginibre


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_psd(rng, n, rank=None):
    G = ginibre(rng, n)[:, : (rank or n)]
    return G @ G.conj().T


NILPOTENT = np.array([[0.0, 1.0], [0.0, 0.0]])
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
