import numpy as np
import pytest

from qkdistill.matcore import DensityOperator


def random_pure_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None,
                   dims: tuple[int, ...] = ()) -> DensityOperator:
    """Random full-rank (or rank-limited) state from a Ginibre matrix."""
    k = rank if rank is not None else dim
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    m = m / np.real(np.trace(m))
    return DensityOperator(m, dims or (dim,))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20231024)
