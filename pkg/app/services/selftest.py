"""
Property suite behind the `selftest` command and the selftest endpoint.

Each check draws its data from a seeded generator and raises AssertionError
with a short message on failure. Checks are small enough to run in seconds.
"""

import logging
import time
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np
import scipy.linalg
from pydantic import BaseModel

from app.core.exceptions import AdmissibilityError
from app.models import PRODUCT_H1_L2, PRODUCT_L2_HM1, GridSpec, StateVector, TorusField
from app.schemas import ProblemConfig, ReportRow, SchemeConfig
from .convergence import fit_order
from .integrators import evolve, high_freq_shortcut, lie_step, shortcut_band, strang_step
from .propagator import apply_A, apply_filter, apply_group, apply_psi, homogeneous_energy_density, psi_operator_bound
from .spectral import (
    from_physical,
    max_imaginary_part,
    product_norm,
    project,
    sobolev_norm,
    to_physical,
)
from .strichartz import check_admissible

logger = logging.getLogger(__name__)

Check = Callable[[np.random.Generator], None]

_CHECKS: Dict[str, Check] = {}


def check(name: str):
    """Register a property check under `name`"""
    def register(func: Check) -> Check:
        _CHECKS[name] = func
        return func
    return register


def available_checks() -> List[str]:
    return list(_CHECKS)


def random_field(grid: GridSpec, rng: np.random.Generator, decay: float = 1.0) -> TorusField:
    """Real field with Hermitian random coefficients damped by (1+|k|^2)^(-decay/2)"""
    raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    axes = tuple(range(grid.d))
    reflected = np.roll(np.flip(raw, axis=axes), 1, axis=axes)
    coeff = 0.5 * (raw + np.conj(reflected)) * (1.0 + grid.k_squared()) ** (-decay / 2.0)
    return TorusField(grid=grid, coeff=coeff, real_flag=True)


def random_state(grid: GridSpec, rng: np.random.Generator, decay: float = 1.0) -> StateVector:
    return StateVector(u=random_field(grid, rng, decay), v=random_field(grid, rng, decay))


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b))) / scale


def _expect(condition: bool, message: str):
    if not condition:
        raise AssertionError(message)


@check("transform_round_trip")
def _check_round_trip(rng):
    for d, K in ((1, 16), (2, 8), (3, 4)):
        f = random_field(GridSpec(d=d, K=K), rng)
        back = from_physical(to_physical(f), f.grid)
        err = _relative(back.coeff, f.coeff)
        _expect(err <= 1e-13, f"round trip error {err:.2e} for d={d}, K={K}")


@check("interpolation_aliasing")
def _check_aliasing(rng):
    grid = GridSpec(d=1, K=1)
    (x,) = grid.nodes()
    f = from_physical(np.exp(2j * x), grid)
    expected = TorusField.from_modes(grid, {(-1,): np.sqrt(2.0 * np.pi)})
    err = float(np.max(np.abs(f.coeff - expected.coeff)))
    _expect(err <= 1e-13, f"alias of k=2 onto k=-1 off by {err:.2e}")


@check("parseval")
def _check_parseval(rng):
    f = random_field(GridSpec(d=3, K=4), rng)
    samples = to_physical(f)
    quadrature = np.sqrt(np.sum(samples ** 2) * (2.0 * np.pi) ** 3 / f.grid.size)
    spectral = sobolev_norm(f, 0.0)
    _expect(abs(quadrature - spectral) <= 1e-12 * spectral, "Parseval identity violated")


@check("projection_inequality")
def _check_projection(rng):
    for K in (2, 4, 8, 16):
        f = random_field(GridSpec(d=2, K=K), rng, decay=0.0)
        for gamma, r in ((0.0, 1.0), (-1.0, 0.0), (-1.0, 1.0)):
            for N in range(1, K + 1):
                tail = sobolev_norm(f - project(f, N), gamma)
                bound = N ** (gamma - r) * sobolev_norm(f, r)
                _expect(tail <= bound * (1.0 + 1e-12), f"projection bound fails at K={K}, N={N}")


@check("bernstein_inequality")
def _check_bernstein(rng):
    for K in (2, 4, 8):
        f = random_field(GridSpec(d=3, K=K), rng, decay=0.0)
        for s in (0.5, 1.0):
            for r in (0.0, 1.0):
                for N in range(1, K + 1):
                    lhs = sobolev_norm(project(f, N), s + r)
                    rhs = (2.0 * N) ** s * sobolev_norm(f, r)
                    _expect(lhs <= rhs * (1.0 + 1e-12), f"Bernstein bound fails at K={K}, N={N}, s={s}")


@check("psi_cancellation")
def _check_psi(rng):
    for d, K, count in ((1, 12, 10), (3, 4, 10), (3, 10, 100)):
        grid = GridSpec(d=d, K=K)
        for tau in (1 / 8, 1 / 37, 1 / 256):
            for _ in range(count):
                U = random_state(grid, rng)
                lhs = apply_A(apply_filter(U, 1.0 / tau)) * tau
                psi = apply_psi(U, tau)
                rhs = apply_group(psi, tau) - psi
                err = _relative(lhs.stacked(), rhs.stacked())
                _expect(err <= 1e-12, f"cancellation identity off by {err:.2e} (d={d}, tau={tau})")


@check("psi_bound")
def _check_psi_bound(rng):
    grid = GridSpec(d=3, K=8)
    for j in range(3, 11):
        bound = psi_operator_bound(2.0 ** -j, grid, 1.0)
        _expect(bound <= 3.0, f"Psi bound {bound:.3f} exceeds 3 at tau=2^-{j}")


@check("group_invariants")
def _check_group(rng):
    grid = GridSpec(d=3, K=4)
    U = random_state(grid, rng)
    s, t = 0.3, -0.55
    law = _relative(apply_group(apply_group(U, s), t).stacked(), apply_group(U, s + t).stacked())
    _expect(law <= 1e-12, f"group law off by {law:.2e}")
    back = _relative(apply_group(apply_group(U, t), -t).stacked(), U.stacked())
    _expect(back <= 1e-12, f"reversibility off by {back:.2e}")
    mask = grid.k_squared() > 0
    before = homogeneous_energy_density(U)[mask]
    after = homogeneous_energy_density(apply_group(U, 0.7))[mask]
    _expect(_relative(before, after) <= 1e-12, "per-mode energy not conserved")


@check("group_matrix_exponential")
def _check_expm(rng):
    grid = GridSpec(d=3, K=2)
    t = 0.7
    U = StateVector(
        u=TorusField.from_modes(grid, {(1, 1, 0): 1.0, (-1, -1, 0): 1.0}, real_flag=True),
        v=TorusField.from_modes(grid, {(1, 1, 0): 0.5, (-1, -1, 0): 0.5}, real_flag=True),
    )
    out = apply_group(U, t)
    expected = scipy.linalg.expm(t * np.array([[0.0, 1.0], [-2.0, 0.0]])) @ np.array([1.0, 0.5])
    got = np.array([out.u.mode((1, 1, 0)).real, out.v.mode((1, 1, 0)).real])
    _expect(np.max(np.abs(got - expected)) <= 1e-12, "group disagrees with matrix exponential")


def _constant_state(value_u: float, value_v: float) -> StateVector:
    grid = GridSpec(d=1, K=1)
    return StateVector(u=TorusField.constant(grid, value_u), v=TorusField.constant(grid, value_v))


def _mean_values(U: StateVector):
    scale = (2.0 * np.pi) ** (U.grid.d / 2)
    return U.u.mode((0,) * U.grid.d).real / scale, U.v.mode((0,) * U.grid.d).real / scale


@check("strang_hand_step")
def _check_strang_hand(rng):
    p = ProblemConfig(alpha=3, mu=1, d=1)
    cfg = SchemeConfig(tau=0.5, T=0.5, K=1)
    u, v = _mean_values(strang_step(_constant_state(1.0, 0.0), p, cfg))
    _expect(abs(u - 0.875) <= 1e-14 and abs(v + 0.41748046875) <= 1e-14, f"Strang step gave ({u}, {v})")


@check("lie_hand_step")
def _check_lie_hand(rng):
    p = ProblemConfig(alpha=3, mu=1, d=1)
    cfg = SchemeConfig(tau=0.5, T=0.5, K=1, scheme="lie")
    u, v = _mean_values(lie_step(_constant_state(1.0, 0.0), p, cfg))
    _expect(abs(u - 0.75) <= 1e-14 and abs(v + 0.5) <= 1e-14, f"Lie step gave ({u}, {v})")


@check("realness")
def _check_realness(rng):
    p = ProblemConfig(alpha=3, mu=1, d=2)
    cfg = SchemeConfig(tau=1 / 8, T=1.0, K=8)
    U = evolve(random_state(GridSpec(d=2, K=8), rng, decay=2.0), p, cfg).state
    worst = max(max_imaginary_part(U.u), max_imaginary_part(U.v))
    _expect(worst <= 1e-12, f"iterates lost realness ({worst:.2e})")


@check("high_frequency_shortcut")
def _check_shortcut(rng):
    p = ProblemConfig(alpha=3, mu=1, d=1)
    cfg = SchemeConfig(tau=1 / 8, T=2.0, K=32)
    U0 = random_state(GridSpec(d=1, K=32), rng, decay=1.5)
    band = shortcut_band(p, cfg)
    final = evolve(U0, p, cfg).state
    evolved_high = final - apply_filter(final, band)
    shortcut = high_freq_shortcut(U0, 16, p, cfg)
    err = _relative(evolved_high.stacked(), shortcut.stacked())
    _expect(err <= 1e-11, f"shortcut differs from evolution by {err:.2e}")


@check("product_norm_ordering")
def _check_product_norms(rng):
    U = random_state(GridSpec(d=3, K=4), rng)
    _expect(product_norm(U, PRODUCT_L2_HM1) <= product_norm(U, PRODUCT_H1_L2), "L2xH-1 exceeds H1xL2")


@check("order_fit_oracle")
def _check_fit(rng):
    rows = [
        ReportRow(alpha=3, mu=1, d=3, K=8, tau=tau, err_l2_hm1=0.7 * tau ** 2, err_h1_l2=0.7 * tau,
                  steps=1, walltime_s=0.0)
        for tau in (2.0 ** -j for j in range(3, 9))
    ]
    order, _, _ = fit_order(rows, 8, "l2_hm1")
    _expect(abs(order - 2.0) <= 1e-12, f"fitted order {order} instead of 2")


@check("strichartz_admissibility")
def _check_admissibility(rng):
    check_admissible(6.0, 9.0)
    try:
        check_admissible(2.0, np.inf)
    except AdmissibilityError:
        return
    raise AssertionError("double endpoint (2, inf) accepted")


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    seconds: float


class SelfTestReport(BaseModel):
    """Outcome of every executed check"""
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]


def run_selftest(names: Optional[Iterable[str]] = None, seed: int = 12345) -> SelfTestReport:
    """Run the registered checks (all of them unless `names` is given)"""
    selected = list(names) if names is not None else available_checks()
    unknown = [name for name in selected if name not in _CHECKS]
    if unknown:
        raise KeyError(f"Unknown checks: {unknown}")

    results = []
    for index, name in enumerate(selected):
        rng = np.random.default_rng([seed, index])
        start = time.perf_counter()
        try:
            _CHECKS[name](rng)
            results.append(CheckResult(name=name, passed=True, seconds=time.perf_counter() - start))
            logger.info(f"Check {name}: passed")
        except AssertionError as e:
            results.append(CheckResult(name=name, passed=False, detail=str(e), seconds=time.perf_counter() - start))
            logger.error(f"Check {name}: FAILED - {e}")
    return SelfTestReport(results=results)
