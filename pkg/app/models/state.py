from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.core.exceptions import ShapeError
from .field import TorusField
from .grid import GridSpec


class StateVector(BaseModel):
    """
    State U = (u, v) of the first-order wave system, v standing for the time
    derivative of u. Both components are real fields on the same grid.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    u: TorusField
    v: TorusField

    @model_validator(mode="after")
    def validate_components(self):
        """Both components on one grid and real-valued"""
        if self.u.grid != self.v.grid:
            raise ShapeError(f"Component grids differ: {self.u.grid!r} vs {self.v.grid!r}")
        if not (self.u.real_flag and self.v.real_flag):
            raise ValueError("State components must be real-valued fields")
        return self

    @classmethod
    def trusted(cls, u: TorusField, v: TorusField) -> "StateVector":
        return cls.model_construct(u=u, v=v)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "StateVector":
        return cls.trusted(TorusField.zeros(grid), TorusField.zeros(grid))

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    def _check_grid(self, other: "StateVector"):
        if other.grid != self.grid:
            raise ShapeError(f"Grid mismatch: {self.grid!r} vs {other.grid!r}")

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check_grid(other)
        return StateVector.trusted(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "StateVector") -> "StateVector":
        self._check_grid(other)
        return StateVector.trusted(self.u - other.u, self.v - other.v)

    def __mul__(self, scalar: Union[int, float]) -> "StateVector":
        return StateVector.trusted(self.u * float(scalar), self.v * float(scalar))

    __rmul__ = __mul__

    def is_finite(self) -> bool:
        return self.u.is_finite() and self.v.is_finite()

    def stacked(self) -> np.ndarray:
        """Coefficients as one array of shape (2, *grid.shape)"""
        return np.stack([self.u.coeff, self.v.coeff])

    def __repr__(self):
        return f"<StateVector(d={self.grid.d}, K={self.grid.K})>"
