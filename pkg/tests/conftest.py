import numpy as np
import pytest

from musr_tomography.spin_tomography.direction import Direction


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Random mixed state from a Ginibre matrix."""
    G = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = G @ G.conj().T
    return rho / np.trace(rho)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_product_mixture(rng: np.random.Generator, terms: int = 3) -> np.ndarray:
    weights = rng.dirichlet(np.ones(terms))
    return sum(w * np.kron(random_density(rng, 2, 1), random_density(rng, 2, 1)) for w in weights)


SINGLET = np.outer([0, 1, -1, 0], [0, 1, -1, 0]) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def axes():
    return Direction.x(), Direction.y(), Direction.z()
