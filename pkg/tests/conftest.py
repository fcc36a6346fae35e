import numpy as np
import pytest

from qitp.hamiltonian import Hamiltonian


def random_hermitian(rng, dim, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


def random_hamiltonian(rng, n, scale=1.0):
    return Hamiltonian(n, random_hermitian(rng, 1 << n, scale), label=f"rand{n}")


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    r = a @ a.conj().T
    return r / np.trace(r)


@pytest.fixture
def rng():
    return np.random.default_rng(20231016)
