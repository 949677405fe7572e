"""
Rough initial data just above the energy space.

Deterministic coefficients f_k = (1+|k|^2)^(-(d/2+s+eps)/2) give a field in
H^(s+eps') for eps' < eps but not in H^(s+eps). The random variant multiplies
each coefficient by r_k uniform in [-1,1] + i[-1,1].

Random draws are reproducible: a PCG64 generator seeded with the given seed
(or SeedSequence) draws all real parts and then all imaginary parts, in
k-lexicographic order (k from -K to K along each axis, last axis fastest).
The draws are then made Hermitian on the flattened lexicographic array,
where reversing the array maps k to -k: r_{-k} <- conj(r_k) for the first
half and r_0 <- Re r_0.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from app.core.exceptions import DomainError, ShapeError
from app.models import PRODUCT_H1_L2, GridSpec, NormKind, StateVector, TorusField
from app.schemas import DiagnosticsRequest, DiagnosticsResponse, InitialDataSpec
from .spectral import lebesgue_norm, norm, pad, product_norm, project, sobolev_norm, truncate

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]


def rough_weights(grid: GridSpec, s: float, eps: float) -> np.ndarray:
    """(1+|k|^2)^(-(d/2+s+eps)/2) in storage order"""
    exponent = -0.5 * (grid.d / 2.0 + s + eps)
    return (1.0 + grid.k_squared()) ** exponent


def deterministic_rough(grid: GridSpec, s: float, eps: float) -> TorusField:
    """Field with coefficients (1+|k|^2)^(-(d/2+s+eps)/2); f_0 = 1"""
    return TorusField.trusted(grid, rough_weights(grid, s, eps).astype(np.complex128), True)


def hermitian_draws(grid: GridSpec, seed: Seed) -> np.ndarray:
    """Symmetrised uniform draws r_k in k-lexicographic order"""
    rng = np.random.Generator(np.random.PCG64(seed))
    real = rng.uniform(-1.0, 1.0, size=grid.size)
    imag = rng.uniform(-1.0, 1.0, size=grid.size)
    flat = real + 1j * imag
    c = flat.size // 2
    flat[:c] = np.conj(flat[::-1][:c])
    flat[c] = flat[c].real
    return flat.reshape(grid.shape)


def random_rough(grid: GridSpec, s: float, eps: float, seed: Seed) -> TorusField:
    """Deterministic coefficients times Hermitian-symmetrised uniform draws"""
    weights = np.fft.fftshift(rough_weights(grid, s, eps))
    return TorusField.from_lexicographic(grid, weights * hermitian_draws(grid, seed), real_flag=True)


def scale_to(f: TorusField, kind: NormKind, target: float, length_scale: float = 1.0) -> TorusField:
    """(target / ||f||) f, measured in the given field norm"""
    current = norm(f, kind, length_scale)
    if not (current > 0.0) or not math.isfinite(current):
        raise DomainError(f"Cannot scale a field with {kind.label} norm {current} to {target}")
    return f * (target / current)


def _raw_component(spec: InitialDataSpec, grid: GridSpec, s: float, seed: Seed) -> TorusField:
    if spec.mode == "random":
        return random_rough(grid, s, spec.eps, seed)
    return deterministic_rough(grid, s, spec.eps)


def make_initial_state(
    spec: InitialDataSpec,
    grid: GridSpec,
    reference_grid: Optional[GridSpec] = None,
    length_scale: float = 1.0,
) -> StateVector:
    """
    Initial state (u0, v0) scaled to ||u0||_{H^1} = target_u and ||v0||_{L^2} = target_v.

    The scaling is computed on `reference_grid` when one is given (the data are
    built there and truncated to `grid`), otherwise on `grid` itself. u0 and v0
    use independent sub-seeds spawned from spec.seed.

    With length_scale L the targets are norms on the torus of side 2*pi/L and
    v0 is returned in the stretched time s = L*t, that is divided by L.
    """
    build = reference_grid or grid
    if build.d != grid.d or build.K < grid.K:
        raise ShapeError(f"Reference grid {build!r} cannot be truncated to {grid!r}")
    seed_u, seed_v = np.random.SeedSequence(spec.seed).spawn(2)
    u = scale_to(_raw_component(spec, build, 1.0, seed_u), NormKind.sobolev(1.0), spec.target_u, length_scale)
    v = scale_to(_raw_component(spec, build, 0.0, seed_v), NormKind.sobolev(0.0), spec.target_v, length_scale)
    if length_scale != 1.0:
        v = v * (1.0 / length_scale)
    if build.K != grid.K:
        u, v = truncate(u, grid.K), truncate(v, grid.K)
    logger.debug(f"Initial data ({spec.mode}) on {grid!r}, scaled on {build!r}")
    return StateVector.trusted(u, v)


def truncated_sobolev_norms(d: int, degrees: Iterable[int], s: float, eps: float, order: float) -> List[float]:
    """H^order norms of pi_K of the deterministic data with regularity s+eps, for each K"""
    return [sobolev_norm(deterministic_rough(GridSpec(d=d, K=K), s, eps), order) for K in degrees]


def lebesgue_growth(f: TorusField, degrees: Iterable[int], q: float) -> Tuple[List[float], float]:
    """||pi_N f||_{L^q} for each N, with the fitted slope of log-norm against log N"""
    degrees = list(degrees)
    values = [lebesgue_norm(project(f, N), q) for N in degrees]
    slope = float(np.polyfit(np.log(degrees), np.log(values), 1)[0]) if len(degrees) > 1 else 0.0
    return values, slope


def shell_spectrum(f: TorusField) -> Dict[int, float]:
    """sum of |f_k|^2 over each shell |k|_inf = n"""
    shells = f.grid.k_inf().ravel()
    energy = np.bincount(shells, weights=np.abs(f.coeff.ravel()) ** 2, minlength=f.grid.K + 1)
    return {n: float(e) for n, e in enumerate(energy)}


def diagnostics(request: DiagnosticsRequest) -> DiagnosticsResponse:
    """Norms, shell spectra and L^q growth of the initial state on one grid"""
    spec = request.spec
    grid = GridSpec(d=request.d, K=request.K)
    U0 = make_initial_state(spec, grid)
    degrees = [N for N in (1, 2, 4, 8, 16, 32, 64) if N <= grid.K]
    # measure the L^q norms on a finer grid so that quadrature resolves pi_N u0
    fine = pad(U0.u, 2 * grid.K)
    growth, _ = lebesgue_growth(fine, degrees, request.q)
    return DiagnosticsResponse(
        d=grid.d,
        K=grid.K,
        spatial_resolution=grid.spatial_resolution,
        norm_u_h1=sobolev_norm(U0.u, 1.0),
        norm_v_l2=sobolev_norm(U0.v, 0.0),
        norm_u_hs=sobolev_norm(U0.u, spec.s_u),
        norm_v_hs=sobolev_norm(U0.v, spec.s_v),
        product_h1_l2=product_norm(U0, PRODUCT_H1_L2),
        lebesgue_q=request.q,
        lebesgue_u={N: value for N, value in zip(degrees, growth)},
        spectrum_u=shell_spectrum(U0.u),
        spectrum_v=shell_spectrum(U0.v),
    )
