import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.core.exceptions import ConfigurationError
from app.models import GridSpec
from app.models.grid import cutoff_degree

# relative tolerance when checking that a horizon is a whole number of steps
STEP_COUNT_RTOL = 1e-9


class ProblemConfig(BaseModel):
    """
    Semilinear wave equation u_tt - Laplace u + mu * u^alpha = 0 on the d-torus.

    box="torus" is the torus (R / 2*pi*Z)^d. box="unit" is the torus [0, 1]^d,
    solved on the 2*pi-periodic grid through the change of variables
    x = 2*pi*y, s = 2*pi*t, which turns the equation into
    w_ss - Laplace w + mu / (2*pi)^2 * w^alpha = 0.
    """
    model_config = ConfigDict(frozen=True)

    alpha: int = 3
    mu: int = 1
    d: int = 3
    box: Literal["torus", "unit"] = "torus"

    @field_validator('alpha')
    @classmethod
    def validate_alpha(cls, v):
        """Validate the power of the nonlinearity"""
        if v not in (2, 3, 4, 5):
            raise ValueError(f'Invalid alpha: {v}. Must be one of [2, 3, 4, 5]')
        return v

    @field_validator('mu')
    @classmethod
    def validate_mu(cls, v):
        """Validate the sign of the nonlinearity (1 defocusing, -1 focusing)"""
        if v not in (-1, 1):
            raise ValueError(f'Invalid mu: {v}. Must be -1 or 1')
        return v

    @field_validator('d')
    @classmethod
    def validate_dimension(cls, v):
        if v not in (1, 2, 3):
            raise ValueError(f'Invalid dimension: {v}. Must be 1, 2 or 3')
        return v

    @property
    def length_scale(self) -> float:
        """2*pi / side length of the box: 1 for the 2*pi-torus, 2*pi for [0, 1]^d"""
        return 2.0 * math.pi if self.box == "unit" else 1.0

    @property
    def coupling(self) -> float:
        """Coefficient of u^alpha on the 2*pi-periodic grid"""
        return self.mu / self.length_scale ** 2


class SchemeConfig(BaseModel):
    """Discretisation of one run: step size, horizon, spectral degree and scheme options"""
    model_config = ConfigDict(frozen=True)

    tau: float
    T: float
    K: int
    filter_cutoff: Optional[float] = None
    scheme: Literal["strang", "lie"] = "strang"
    dealias: bool = False
    shortcut: bool = False

    @field_validator('tau')
    @classmethod
    def validate_tau(cls, v):
        """Step size must lie in (0, 1]"""
        if not (0.0 < v <= 1.0):
            raise ValueError(f'Step size must lie in (0, 1], got {v}')
        return v

    @field_validator('K')
    @classmethod
    def validate_degree(cls, v):
        if v < 1:
            raise ValueError(f'Spectral degree must be at least 1, got {v}')
        return v

    @field_validator('filter_cutoff')
    @classmethod
    def validate_filter_cutoff(cls, v):
        if v is not None and not (v >= 0.0):
            raise ValueError(f'Filter cutoff cannot be negative, got {v}')
        return v

    @model_validator(mode='after')
    def validate_horizon(self):
        """Horizon must cover at least one step"""
        if self.T < self.tau * (1.0 - STEP_COUNT_RTOL):
            raise ValueError(f'Horizon T={self.T} is shorter than one step tau={self.tau}')
        return self

    @property
    def cutoff(self) -> float:
        """Filter cutoff N of Pi_N (1/tau unless given explicitly)"""
        if self.filter_cutoff is not None:
            return self.filter_cutoff
        return 1.0 / self.tau

    @property
    def cutoff_index(self) -> int:
        """Largest |k|_inf kept by the filter"""
        return cutoff_degree(self.cutoff)

    def grid(self, d: int) -> GridSpec:
        return GridSpec(d=d, K=self.K)

    def steps_for(self, T: Optional[float] = None) -> int:
        """Number of steps that reach T exactly; T defaults to the horizon"""
        T = self.T if T is None else T
        n = int(round(T / self.tau))
        if n < 0 or abs(n * self.tau - T) > STEP_COUNT_RTOL * max(T, self.tau):
            raise ConfigurationError(f'Time {T} is not a multiple of the step size {self.tau}')
        return n
