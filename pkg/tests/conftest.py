import numpy as np
import pytest

from app.models import GridSpec, StateVector, TorusField
from app.schemas import ProblemConfig, SchemeConfig


def hermitian_coefficients(grid: GridSpec, rng: np.random.Generator, decay: float = 1.0) -> np.ndarray:
    """Random coefficients with f_{-k} = conj(f_k), damped by (1+|k|^2)^(-decay/2)"""
    raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    axes = tuple(range(grid.d))
    reflected = np.roll(np.flip(raw, axis=axes), 1, axis=axes)
    return 0.5 * (raw + np.conj(reflected)) * (1.0 + grid.k_squared()) ** (-decay / 2.0)


def direct_samples(f: TorusField) -> np.ndarray:
    """O(M^2d) evaluation of (2pi)^(-d/2) sum_k f_k exp(i k.x_j) on the nodes"""
    grid = f.grid
    k = np.stack(np.meshgrid(*([grid.wavenumbers()] * grid.d), indexing="ij"), axis=-1).reshape(-1, grid.d)
    x = 2.0 * np.pi * k / grid.M
    phases = np.exp(1j * x @ k.T)
    values = phases @ f.coeff.reshape(-1) * (2.0 * np.pi) ** (-grid.d / 2)
    return values.reshape(grid.shape)


@pytest.fixture
def rng():
    """Seeded generator so every test sees the same data"""
    return np.random.default_rng(20240601)


@pytest.fixture
def make_field(rng):
    """Factory for random real fields"""
    def factory(d: int, K: int, decay: float = 1.0) -> TorusField:
        grid = GridSpec(d=d, K=K)
        return TorusField(grid=grid, coeff=hermitian_coefficients(grid, rng, decay), real_flag=True)
    return factory


@pytest.fixture
def make_state(make_field):
    """Factory for random real states"""
    def factory(d: int, K: int, decay: float = 1.0) -> StateVector:
        return StateVector(u=make_field(d, K, decay), v=make_field(d, K, decay))
    return factory


@pytest.fixture
def cubic():
    """Defocusing cubic problem in three dimensions"""
    return ProblemConfig(alpha=3, mu=1, d=3)


@pytest.fixture
def cubic_1d():
    return ProblemConfig(alpha=3, mu=1, d=1)


@pytest.fixture
def half_step_scheme():
    """tau = 1/2 on the smallest grid"""
    return SchemeConfig(tau=0.5, T=0.5, K=1)
