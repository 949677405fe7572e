"""
Exact Fourier-multiplier operators of the linear wave system.

A(u, v) = (v, Laplace u) generates the group

    e^{tA} = [[cos(t|k|),          t sinc(t|k|)],
              [-|k| sin(t|k|),     cos(t|k|)   ]]

per mode k, with sinc(z) = sin(z)/z and sinc(0) = 1. All operators act
mode by mode; there is no time-stepping error in the linear part.
"""

import logging
from typing import Tuple

import numpy as np

from app.core.exceptions import DomainError, ShapeError
from app.models import GridSpec, StateVector, TorusField
from .spectral import cutoff_degree, project

logger = logging.getLogger(__name__)

# below this argument the symbol of Psi uses its Taylor expansion
PSI_SERIES_THRESHOLD = 1e-6


def group_symbols(grid: GridSpec, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """cos(t|k|), t sinc(t|k|) and -|k| sin(t|k|) for every stored mode"""
    kabs = np.sqrt(grid.k_squared())
    cos = np.cos(t * kabs)
    # np.sinc is the normalised sinc sin(pi x)/(pi x)
    sin_over_k = t * np.sinc(t * kabs / np.pi)
    k_sin = -kabs * np.sin(t * kabs)
    return cos, sin_over_k, k_sin


class WaveGroup:
    """
    e^{tA} on one grid with its symbols computed once.

    A run that applies the same step many times keeps one instance; one-off
    propagations go through apply_group.
    """

    def __init__(self, grid: GridSpec, t: float):
        self.grid = grid
        self.t = float(t)
        self.cos, self.sin_over_k, self.k_sin = group_symbols(grid, self.t)

    def __call__(self, U: StateVector) -> StateVector:
        if U.grid != self.grid:
            raise ShapeError(f"Group built for {self.grid!r} applied to a state on {U.grid!r}")
        u, v = U.u.coeff, U.v.coeff
        return StateVector.trusted(
            TorusField.trusted(U.grid, self.cos * u + self.sin_over_k * v, True),
            TorusField.trusted(U.grid, self.k_sin * u + self.cos * v, True),
        )

    def __repr__(self):
        return f"<WaveGroup(t={self.t}, grid={self.grid!r})>"


def psi_symbol(x: np.ndarray) -> np.ndarray:
    """m(x) = x sin(x) / (cos(x) - 1) = -x cot(x/2), with m(0) = -2"""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < PSI_SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)
    return np.where(small, -2.0 + x ** 2 / 6.0, -safe / np.tan(safe / 2.0))


def _check_step(tau: float):
    if not (0.0 < tau <= 1.0):
        raise DomainError(f"Step size must lie in (0, 1], got {tau}")


def apply_A(U: StateVector) -> StateVector:
    """A(u, v) = (v, Laplace u)"""
    ksq = U.grid.k_squared()
    return StateVector.trusted(U.v, TorusField.trusted(U.grid, -ksq * U.u.coeff, U.u.real_flag))


def apply_group(U: StateVector, t: float) -> StateVector:
    """e^{tA} U, exact per mode; mode k = 0 evolves as (c1 + t c2, c2)"""
    if t == 0.0:
        return U
    return WaveGroup(U.grid, t)(U)


def apply_filter(U: StateVector, cutoff: float) -> StateVector:
    """Pi_N = diag(pi_N, pi_N)"""
    return StateVector.trusted(project(U.u, cutoff), project(U.v, cutoff))


def _psi_entries(grid: GridSpec, tau: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonal, upper and lower entries of Psi_tau per mode (zero off the filter)"""
    mask = grid.k_inf() <= cutoff_degree(1.0 / tau)
    ksq = grid.k_squared()
    # inside the filter tau*|k| <= sqrt(3), far from the first resonance at 2*pi
    x = tau * np.sqrt(ksq)
    diag = np.where(mask, -psi_symbol(x) / 2.0, 0.0)
    upper = np.where(mask, -tau / 2.0, 0.0)
    lower = np.where(mask, tau * ksq / 2.0, 0.0)
    return diag, upper, lower


def apply_psi(U: StateVector, tau: float) -> StateVector:
    """Summation-by-parts operator Psi_tau with tau A Pi_{1/tau} = (e^{tau A} - I) Psi_tau"""
    _check_step(tau)
    diag, upper, lower = _psi_entries(U.grid, tau)
    u, v = U.u.coeff, U.v.coeff
    return StateVector.trusted(
        TorusField.trusted(U.grid, diag * u + upper * v, True),
        TorusField.trusted(U.grid, lower * u + diag * v, True),
    )


def psi_operator_bound(tau: float, grid: GridSpec, r: float) -> float:
    """Norm of Psi_tau on H^r x H^(r-1): the largest per-mode 2x2 spectral norm.

    Only the ratio of the two weights enters, so the value is the same for every r.
    """
    _check_step(tau)
    diag, upper, lower = _psi_entries(grid, tau)
    ratio = np.sqrt(1.0 + grid.k_squared())  # weight of H^r over weight of H^(r-1)
    blocks = np.empty(diag.shape + (2, 2))
    blocks[..., 0, 0] = diag
    blocks[..., 1, 1] = diag
    blocks[..., 0, 1] = upper * ratio
    blocks[..., 1, 0] = lower / ratio
    norms = np.linalg.norm(blocks.reshape(-1, 2, 2), ord=2, axis=(1, 2))
    logger.debug(f"Psi bound for tau={tau}, r={r}: {norms.max():.4f}")
    return float(norms.max())


def homogeneous_energy_density(U: StateVector) -> np.ndarray:
    """|k|^2 |u_k|^2 + |v_k|^2 per mode, invariant under the linear flow for k != 0"""
    return U.grid.k_squared() * np.abs(U.u.coeff) ** 2 + np.abs(U.v.coeff) ** 2
