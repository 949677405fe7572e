"""
Spectral core: transforms, frequency projections and norms of torus fields.

Physical samples live on the M^d collocation nodes x_j = 2*pi*j/M and are
stored in the same FFT-natural order as the coefficients. With the field
convention f(x) = (2*pi)^(-d/2) * sum_k f_k e^{ik.x}:

    samples = (2*pi)^(-d/2) * M^d * ifftn(coeff)
    coeff   = (2*pi)^(d/2)  * M^(-d) * fftn(samples)

which is the trigonometric interpolation I_K of the sampled function.
"""

import logging
import math

import numpy as np
import scipy.fft

from app.core.config import settings
from app.core.exceptions import DomainError, ShapeError
from app.models import GridSpec, NormKind, StateVector, TorusField
from app.models.grid import cutoff_degree

logger = logging.getLogger(__name__)


def to_physical(f: TorusField) -> np.ndarray:
    """Samples of f on the collocation grid (real array for real fields)"""
    grid = f.grid
    scale = grid.size * (2.0 * np.pi) ** (-grid.d / 2)
    samples = scipy.fft.ifftn(f.coeff, workers=settings.FFT_WORKERS) * scale
    if f.real_flag:
        return samples.real
    return samples


def from_physical(samples: np.ndarray, grid: GridSpec) -> TorusField:
    """Trigonometric interpolant of degree K through the given samples"""
    samples = np.asarray(samples)
    if samples.shape != grid.shape:
        raise ShapeError(f"Samples of shape {samples.shape} do not match grid shape {grid.shape}")
    scale = (2.0 * np.pi) ** (grid.d / 2) / grid.size
    coeff = scipy.fft.fftn(samples, workers=settings.FFT_WORKERS) * scale
    return TorusField.trusted(grid, coeff, real_flag=not np.iscomplexobj(samples))


def project(f: TorusField, N: float) -> TorusField:
    """Square frequency cut-off: keep the modes with |k|_inf <= N"""
    n = cutoff_degree(N)
    if n >= f.grid.K:
        return f
    mask = f.grid.k_inf() <= n
    return TorusField.trusted(f.grid, np.where(mask, f.coeff, 0.0), f.real_flag)


def pad(f: TorusField, L: int) -> TorusField:
    """Exact embedding of f into the grid of degree L >= K"""
    K = f.grid.K
    if L < K:
        raise DomainError(f"Cannot pad degree {K} to smaller degree {L}")
    if L == K:
        return f
    width = L - K
    padded = np.pad(f.lexicographic(), [(width, width)] * f.grid.d)
    return TorusField.trusted(f.grid.with_degree(L), np.fft.ifftshift(padded), f.real_flag)


def truncate(f: TorusField, N: int) -> TorusField:
    """Restriction of f to the grid of degree N <= K (drops |k|_inf > N)"""
    K = f.grid.K
    if N > K or N < 1:
        raise DomainError(f"Cannot truncate degree {K} to degree {N}")
    if N == K:
        return f
    centre = slice(K - N, K + N + 1)
    cut = f.lexicographic()[(centre,) * f.grid.d]
    return TorusField.trusted(f.grid.with_degree(N), np.fft.ifftshift(cut), f.real_flag)


def sobolev_norm(f: TorusField, s: float, length_scale: float = 1.0) -> float:
    """H^s norm: sqrt(sum_k (1+|k|^2)^s |f_k|^2) over the stored modes.

    With length_scale L != 1 the field is read as a function on the torus of
    side 2*pi/L and the norm is sqrt(sum_k (1+L^2|k|^2)^s |f_k|^2) * L^(-d/2).
    """
    weight = (1.0 + length_scale ** 2 * f.grid.k_squared()) ** s
    value = float(np.sqrt(np.sum(weight * np.abs(f.coeff) ** 2)))
    if length_scale == 1.0:
        return value
    return value * length_scale ** (-f.grid.d / 2)


def lebesgue_norm(f: TorusField, q: float, length_scale: float = 1.0) -> float:
    """L^q norm by quadrature on the collocation grid; q = inf gives max |f(x_j)|.

    length_scale L rescales the volume to that of the torus of side 2*pi/L.
    """
    if not (1.0 <= q <= math.inf):
        raise DomainError(f"Lebesgue exponent must lie in [1, inf], got {q}")
    values = np.abs(to_physical(f))
    if math.isinf(q):
        return float(np.max(values))
    grid = f.grid
    weight = (2.0 * np.pi / length_scale) ** grid.d / grid.size
    return float((weight * np.sum(values ** q)) ** (1.0 / q))


def norm(f: TorusField, kind: NormKind, length_scale: float = 1.0) -> float:
    """Sobolev or Lebesgue norm of a field"""
    if kind.tag == "sobolev":
        return sobolev_norm(f, kind.s, length_scale)
    if kind.tag == "lebesgue":
        return lebesgue_norm(f, kind.q, length_scale)
    raise DomainError(f"{kind.label} is a product norm and applies to states only")


def product_norm(U: StateVector, kind: NormKind, length_scale: float = 1.0) -> float:
    """sqrt(||u||_{H^a}^2 + ||v||_{H^(a-1)}^2) with a = 1 (H1xL2) or a = 0 (L2xH-1).

    With length_scale L the velocity is stored in the stretched time s = L*t,
    so v is multiplied by L before it is measured.
    """
    if not kind.is_product:
        raise DomainError(f"{kind.label} is not a product norm")
    a = kind.product_order
    velocity = sobolev_norm(U.v, a - 1, length_scale) * length_scale
    return float(math.hypot(sobolev_norm(U.u, a, length_scale), velocity))


def pointwise_power(f: TorusField, alpha: int, dealias: bool = False) -> TorusField:
    """alpha-th power of a real field.

    dealias=False interpolates the pointwise power on the grid of f (aliased,
    the I_K of the fully discrete scheme). dealias=True returns the exact
    truncation Pi_K(f^alpha) by sampling on the zero-padded grid of degree
    alpha*K, where f^alpha is representable without aliasing.
    """
    if int(alpha) != alpha or alpha < 1:
        raise DomainError(f"Power must be a positive integer, got {alpha}")
    if not f.real_flag:
        raise DomainError("Pointwise powers are defined for real fields only")
    alpha = int(alpha)
    if not dealias:
        return from_physical(to_physical(f) ** alpha, f.grid)
    fine = pad(f, alpha * f.grid.K)
    power = from_physical(to_physical(fine) ** alpha, fine.grid)
    return truncate(power, f.grid.K)


def integrate_power(f: TorusField, p: int) -> float:
    """Exact integral of f^p over the torus for a real band-limited field.

    Uses quadrature on the padded grid of degree L = ceil(p*K/2); since
    2L + 1 > p*K no mode of f^p aliases onto k = 0.
    """
    if not f.real_flag:
        raise DomainError("Integrals of powers are defined for real fields only")
    L = max(f.grid.K, math.ceil(p * f.grid.K / 2))
    fine = pad(f, L)
    values = to_physical(fine) ** p
    return float(np.sum(values) * (2.0 * np.pi) ** f.grid.d / fine.grid.size)


def interpolate(f: TorusField, K: int) -> TorusField:
    """Trigonometric interpolation I_K of a field given on a finer grid.

    The grid of f must have M_f divisible by 2K+1 so that the degree-K nodes
    are a subset of the nodes of f.
    """
    M = 2 * K + 1
    if f.grid.M % M != 0:
        raise ShapeError(f"Grid with M={f.grid.M} does not contain the nodes of degree {K}")
    stride = f.grid.M // M
    samples = to_physical(f)[(slice(None, None, stride),) * f.grid.d]
    return from_physical(samples, f.grid.with_degree(K))


def interpolation_error(f: TorusField, K: int, q: float) -> float:
    """||(I - I_K) f||_{L^q}, measured by quadrature on the grid of f"""
    interpolant = pad(interpolate(f, K), f.grid.K)
    return lebesgue_norm(f - interpolant, q)


def max_imaginary_part(f: TorusField) -> float:
    """Largest imaginary part of the samples of f relative to the largest modulus"""
    grid = f.grid
    samples = scipy.fft.ifftn(f.coeff, workers=settings.FFT_WORKERS) * grid.size * (2.0 * np.pi) ** (-grid.d / 2)
    scale = max(float(np.max(np.abs(samples))), np.finfo(float).tiny)
    return float(np.max(np.abs(samples.imag))) / scale
