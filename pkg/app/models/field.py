"""
Band-limited torus fields.

A field stores its Fourier coefficients f_k, |k|_inf <= K, with the
convention f(x) = (2*pi)^(-d/2) * sum_k f_k * exp(i k.x). Coefficients are
kept in the storage order of the grid (see app.models.grid).
"""

from typing import Dict, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.core.exceptions import ShapeError
from .grid import GridSpec

HERMITIAN_RTOL = 1e-13

Number = Union[int, float, complex]


def reflect(coeff: np.ndarray) -> np.ndarray:
    """Coefficient array evaluated at -k, in storage order"""
    axes = tuple(range(coeff.ndim))
    return np.roll(np.flip(coeff, axis=axes), 1, axis=axes)


def hermitian_defect(coeff: np.ndarray) -> float:
    """Relative violation of f_{-k} = conj(f_k)"""
    scale = float(np.max(np.abs(coeff))) if coeff.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(reflect(coeff) - np.conj(coeff)))) / scale


class TorusField(BaseModel):
    """
    Immutable band-limited field on the d-torus.

    Attributes:
        grid: grid of degree K the coefficients live on
        coeff: complex coefficients, shape grid.shape, storage order
        real_flag: True if the field is real-valued (Hermitian coefficients)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: GridSpec
    coeff: np.ndarray
    real_flag: bool = True

    @field_validator("coeff", mode="before")
    @classmethod
    def validate_coeff(cls, v):
        """Store coefficients as a private complex128 array"""
        arr = np.array(v, dtype=np.complex128, copy=True)
        if not np.all(np.isfinite(arr)):
            raise ValueError("Fourier coefficients must be finite")
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")
    def validate_layout(self):
        """Check the shape against the grid and the symmetry of real fields"""
        if self.coeff.shape != self.grid.shape:
            raise ShapeError(
                f"Coefficient shape {self.coeff.shape} does not match grid shape {self.grid.shape}"
            )
        if self.real_flag:
            defect = hermitian_defect(self.coeff)
            if defect > HERMITIAN_RTOL:
                raise ValueError(f"Real field violates Hermitian symmetry (defect {defect:.3e})")
        return self

    @classmethod
    def trusted(cls, grid: GridSpec, coeff: np.ndarray, real_flag: bool = True) -> "TorusField":
        """Build a field from coefficients already known to satisfy the invariants.

        Skips validation; the array is taken over without a copy.
        """
        coeff = np.asarray(coeff, dtype=np.complex128)
        coeff.flags.writeable = False
        return cls.model_construct(grid=grid, coeff=coeff, real_flag=real_flag)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "TorusField":
        return cls.trusted(grid, np.zeros(grid.shape, dtype=np.complex128), True)

    @classmethod
    def constant(cls, grid: GridSpec, value: float) -> "TorusField":
        """The constant function f = value"""
        coeff = np.zeros(grid.shape, dtype=np.complex128)
        coeff[(0,) * grid.d] = value * (2.0 * np.pi) ** (grid.d / 2)
        return cls(grid=grid, coeff=coeff, real_flag=bool(np.isreal(value)))

    @classmethod
    def from_modes(
        cls, grid: GridSpec, modes: Dict[Tuple[int, ...], Number], real_flag: bool = False
    ) -> "TorusField":
        """Field with the given coefficients f_k and all other coefficients zero"""
        coeff = np.zeros(grid.shape, dtype=np.complex128)
        for k, value in modes.items():
            coeff[grid.storage_index(k)] = value
        return cls(grid=grid, coeff=coeff, real_flag=real_flag)

    @classmethod
    def from_lexicographic(cls, grid: GridSpec, coeff: np.ndarray, real_flag: bool = True) -> "TorusField":
        """Inverse of `lexicographic`"""
        return cls(grid=grid, coeff=np.fft.ifftshift(np.asarray(coeff)), real_flag=real_flag)

    def lexicographic(self) -> np.ndarray:
        """Coefficients ordered with k running from -K to K along each axis"""
        return np.fft.fftshift(self.coeff)

    def mode(self, k: Tuple[int, ...]) -> complex:
        """Coefficient f_k"""
        return complex(self.coeff[self.grid.storage_index(k)])

    def _check_grid(self, other: "TorusField"):
        if other.grid != self.grid:
            raise ShapeError(f"Grid mismatch: {self.grid!r} vs {other.grid!r}")

    def __add__(self, other: "TorusField") -> "TorusField":
        self._check_grid(other)
        return TorusField.trusted(self.grid, self.coeff + other.coeff, self.real_flag and other.real_flag)

    def __sub__(self, other: "TorusField") -> "TorusField":
        self._check_grid(other)
        return TorusField.trusted(self.grid, self.coeff - other.coeff, self.real_flag and other.real_flag)

    def __mul__(self, scalar: Number) -> "TorusField":
        real = self.real_flag and complex(scalar).imag == 0.0
        return TorusField.trusted(self.grid, self.coeff * scalar, real)

    __rmul__ = __mul__

    def __neg__(self) -> "TorusField":
        return TorusField.trusted(self.grid, -self.coeff, self.real_flag)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeff)))

    def __repr__(self):
        return f"<TorusField(d={self.grid.d}, K={self.grid.K}, real={self.real_flag})>"
