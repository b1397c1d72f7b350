import numpy as np
import pytest

from opcake import HermitianMatrix


def rand_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(g + g.conj().T)


def rand_pd(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix(g @ g.conj().T + 1e-3 * np.eye(dim))


def rand_psd(dim, seed, rank=None):
    rng = np.random.default_rng(seed)
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return HermitianMatrix(g @ g.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
