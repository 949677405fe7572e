"""
Collocation grid of a band-limited torus field.

A grid of spectral degree K in dimension d carries the wavenumbers
k in {-K, ..., K}^d and the M = 2K + 1 collocation nodes x_j = 2*pi*j / M
per axis, j in {-K, ..., K}.

Storage order is FFT-natural along every axis: array index i holds the
wavenumber (or node index) k = i for i <= K and k = i - M for i > K.
The same bijection is used for coefficients and for physical samples.
"""

import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.exceptions import DomainError

# relative slack used when turning a real cutoff into an integer degree
CUTOFF_SLACK = 1e-12


def cutoff_degree(N: float) -> int:
    """Largest integer n with n <= N, up to a relative slack of 1e-12 (so 1/(1/37) gives 37)"""
    if math.isnan(N) or N < 0:
        raise DomainError(f"Frequency cutoff must be nonnegative, got {N}")
    if math.isinf(N):
        return np.iinfo(np.int64).max
    return int(math.floor(N * (1.0 + CUTOFF_SLACK)))


@lru_cache(maxsize=64)
def _axis_wavenumbers(M: int) -> np.ndarray:
    k = np.fft.fftfreq(M, d=1.0 / M).round().astype(np.int64)
    k.flags.writeable = False
    return k


@lru_cache(maxsize=32)
def _k_squared(d: int, K: int) -> np.ndarray:
    k = _axis_wavenumbers(2 * K + 1)
    ksq = np.zeros((2 * K + 1,) * d, dtype=np.float64)
    for axis in range(d):
        shape = [1] * d
        shape[axis] = -1
        ksq = ksq + (k.astype(np.float64) ** 2).reshape(shape)
    ksq.flags.writeable = False
    return ksq


@lru_cache(maxsize=32)
def _k_inf(d: int, K: int) -> np.ndarray:
    k = np.abs(_axis_wavenumbers(2 * K + 1))
    kinf = np.zeros((2 * K + 1,) * d, dtype=np.int64)
    for axis in range(d):
        shape = [1] * d
        shape[axis] = -1
        kinf = np.maximum(kinf, k.reshape(shape))
    kinf.flags.writeable = False
    return kinf


class GridSpec(BaseModel):
    """
    Immutable description of the collocation grid of degree K on the d-torus.

    Attributes:
        d: spatial dimension (1, 2 or 3)
        K: spectral degree, the largest |k|_inf that is stored

    Example:
        >>> grid = GridSpec(d=1, K=1)
        >>> grid.M
        3
        >>> grid.wavenumbers().tolist()
        [0, 1, -1]
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, le=3, description="Spatial dimension")
    K: int = Field(ge=1, description="Spectral degree (max |k|_inf)")

    @field_validator("d", "K", mode="before")
    @classmethod
    def validate_integral(cls, v):
        """Reject non-integral values instead of truncating them"""
        if isinstance(v, float) and not v.is_integer():
            raise ValueError(f"Grid parameters must be integers, got {v}")
        return v

    @property
    def M(self) -> int:
        """Number of collocation points per axis (always odd)"""
        return 2 * self.K + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.M,) * self.d

    @property
    def size(self) -> int:
        return self.M ** self.d

    @property
    def spatial_resolution(self) -> float:
        """Node distance h = 1/M under the identification of the torus with [0, 1]^d"""
        return 1.0 / self.M

    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers of one axis in storage order"""
        return _axis_wavenumbers(self.M)

    def k_squared(self) -> np.ndarray:
        """|k|^2 for every stored mode (read-only)"""
        return _k_squared(self.d, self.K)

    def k_inf(self) -> np.ndarray:
        """|k|_inf for every stored mode (read-only)"""
        return _k_inf(self.d, self.K)

    def k_components(self) -> Tuple[np.ndarray, ...]:
        """Broadcastable per-axis wavenumber arrays"""
        k = self.wavenumbers()
        out = []
        for axis in range(self.d):
            shape = [1] * self.d
            shape[axis] = -1
            out.append(k.reshape(shape))
        return tuple(out)

    def nodes(self) -> Tuple[np.ndarray, ...]:
        """Broadcastable per-axis node coordinates x_j = 2*pi*j/M in storage order"""
        return tuple(2.0 * np.pi * k / self.M for k in self.k_components())

    def storage_index(self, k: Tuple[int, ...]) -> Tuple[int, ...]:
        """Array index of the wavenumber k"""
        if len(k) != self.d:
            raise ValueError(f"Wavenumber {k} does not have dimension {self.d}")
        if max(abs(int(c)) for c in k) > self.K:
            raise ValueError(f"Wavenumber {k} is outside degree {self.K}")
        return tuple(int(c) % self.M for c in k)

    def with_degree(self, K: int) -> "GridSpec":
        return GridSpec(d=self.d, K=K)

    def __repr__(self):
        return f"<GridSpec(d={self.d}, K={self.K}, M={self.M})>"
