"""
Filtered splitting time steppers for u_tt - Laplace u + mu u^alpha = 0.

The nonlinear part acts on the velocity only, G(u, v) = (0, g(u)) with
g(u) = -mu * I_K[(pi_N u)^alpha], and the linear part is the exact group
e^{tau A}. The fully discrete Strang step is

    U_half = e^{tau A} (U_n + tau/2 G(U_n))
    U_next = U_half + tau/2 G(U_half)

and the Lie step is U_next = e^{tau A} (U_n + tau G(U_n)).
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.exceptions import BlowUpError, PreconditionError
from app.models import NormKind, StateVector, TorusField
from app.schemas import ProblemConfig, SchemeConfig
from .propagator import WaveGroup, apply_filter, apply_group
from .spectral import integrate_power, norm, pad, pointwise_power, product_norm, project, truncate

logger = logging.getLogger(__name__)

_nonlinearity_enabled: ContextVar[bool] = ContextVar("nonlinearity_enabled", default=True)

Stepper = Callable[..., StateVector]


@contextmanager
def linear_only():
    """Switch g off inside the block, so every step reduces to the linear group"""
    token = _nonlinearity_enabled.set(False)
    try:
        yield
    finally:
        _nonlinearity_enabled.reset(token)


def g_eval(u: TorusField, p: ProblemConfig, cfg: SchemeConfig) -> TorusField:
    """g(u) = -mu * pointwise_power(project(u, cutoff), alpha, dealias)

    mu is taken as p.coupling, which is mu itself on the 2*pi-torus.
    """
    if not _nonlinearity_enabled.get():
        return TorusField.zeros(u.grid)
    power = pointwise_power(project(u, cfg.cutoff), p.alpha, cfg.dealias)
    return power * float(-p.coupling)


def _kick(U: StateVector, g: TorusField, h: float) -> StateVector:
    """U + h (0, g)"""
    return StateVector.trusted(U.u, U.v + g * h)


def _check_finite(U: StateVector, step: int) -> StateVector:
    if not U.is_finite():
        raise BlowUpError(step)
    return U


def _propagate(U: StateVector, cfg: SchemeConfig, group: Optional[WaveGroup]) -> StateVector:
    """e^{tau A} U, through the precomputed group when one is given"""
    if group is None:
        return apply_group(U, cfg.tau)
    return group(U)


def strang_step(
    U: StateVector, p: ProblemConfig, cfg: SchemeConfig, step: int = 1, group: Optional[WaveGroup] = None
) -> StateVector:
    """One filtered Strang step; `step` only labels a blow-up"""
    half = 0.5 * cfg.tau
    with np.errstate(over="ignore", invalid="ignore"):
        U_half = _propagate(_kick(U, g_eval(U.u, p, cfg), half), cfg, group)
        U_next = _kick(U_half, g_eval(U_half.u, p, cfg), half)
    return _check_finite(U_next, step)


def lie_step(
    U: StateVector, p: ProblemConfig, cfg: SchemeConfig, step: int = 1, group: Optional[WaveGroup] = None
) -> StateVector:
    """One filtered Lie step e^{tau A} (U + tau G(U))"""
    with np.errstate(over="ignore", invalid="ignore"):
        U_next = _propagate(_kick(U, g_eval(U.u, p, cfg), cfg.tau), cfg, group)
    return _check_finite(U_next, step)


STEPPERS: Dict[str, Stepper] = {
    "strang": strang_step,
    "lie": lie_step,
}


def energy(U: StateVector, p: ProblemConfig) -> float:
    """E = int 1/2 |v|^2 + 1/2 |grad u|^2 + mu/(alpha+1) u^(alpha+1) dx"""
    kinetic = 0.5 * float(np.sum(np.abs(U.v.coeff) ** 2))
    gradient = 0.5 * float(np.sum(U.grid.k_squared() * np.abs(U.u.coeff) ** 2))
    potential = p.coupling / (p.alpha + 1) * integrate_power(U.u, p.alpha + 1)
    return kinetic + gradient + potential


def to_grid(U: StateVector, K: int) -> StateVector:
    """Pi_K U expressed on the grid of degree K (truncating or zero-padding)"""
    if K == U.grid.K:
        return U
    if K < U.grid.K:
        return StateVector.trusted(truncate(U.u, K), truncate(U.v, K))
    return StateVector.trusted(pad(U.u, K), pad(U.v, K))


def shortcut_band(p: ProblemConfig, cfg: SchemeConfig) -> int:
    """Largest |k|_inf the filtered nonlinearity can reach: alpha * floor(cutoff)"""
    return p.alpha * cfg.cutoff_index


def high_freq_shortcut(U0: StateVector, n: int, p: ProblemConfig, cfg: SchemeConfig) -> StateVector:
    """
    High band (Pi_K - Pi_band) U_n of the fully discrete solution, computed
    directly from the data as e^{n tau A} (Pi_K - Pi_band) U0.

    Raises:
        PreconditionError: if K <= band, when there is no high band
    """
    band = shortcut_band(p, cfg)
    if cfg.K <= band:
        raise PreconditionError(f"Shortcut needs K > alpha*floor(cutoff) = {band}, got K={cfg.K}")
    if n < 0:
        raise PreconditionError(f"Step count must be nonnegative, got {n}")
    U0 = to_grid(U0, cfg.K)
    high = U0 - apply_filter(U0, band)
    return apply_group(high, n * cfg.tau)


class Observer:
    """Callback invoked with (step index, time, state); must not mutate the state"""
    name: str = "observer"

    def __call__(self, n: int, t: float, U: StateVector):
        raise NotImplementedError

    def result(self) -> Any:
        return None


class EnergyObserver(Observer):
    """Records the energy at every observed time"""
    name = "energy"

    def __init__(self, p: ProblemConfig):
        self.p = p
        self.records: List[Tuple[int, float, float]] = []

    def __call__(self, n: int, t: float, U: StateVector):
        self.records.append((n, t, energy(U, self.p)))

    def max_relative_drift(self) -> float:
        """max_n |E(t_n) - E(0)| / |E(0)|"""
        if not self.records:
            return 0.0
        E0 = self.records[0][2]
        scale = abs(E0) if E0 != 0.0 else 1.0
        return max(abs(E - E0) for _, _, E in self.records) / scale

    def result(self) -> List[Tuple[int, float, float]]:
        return list(self.records)


class NormObserver(Observer):
    """Records a field or product norm at every observed time"""

    def __init__(self, kind: NormKind, component: str = "u"):
        self.kind = kind
        self.component = component
        self.name = f"norm_{kind.label}" if kind.is_product else f"norm_{component}_{kind.label}"
        self.records: List[Tuple[int, float, float]] = []

    def __call__(self, n: int, t: float, U: StateVector):
        if self.kind.is_product:
            value = product_norm(U, self.kind)
        else:
            value = norm(getattr(U, self.component), self.kind)
        self.records.append((n, t, value))

    def result(self) -> List[Tuple[int, float, float]]:
        return list(self.records)


class StateCollector(Observer):
    """Keeps the states at the observed times"""
    name = "states"

    def __init__(self):
        self.states: List[Tuple[int, float, StateVector]] = []

    def __call__(self, n: int, t: float, U: StateVector):
        self.states.append((n, t, U))

    def result(self) -> List[Tuple[int, float, StateVector]]:
        return list(self.states)


class EvolveResult(BaseModel):
    """Final state of an evolution plus the records of its observers"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    state: StateVector
    steps: int
    shortcut_used: bool = False
    records: Dict[str, Any] = {}


def evolve(
    U0: StateVector,
    p: ProblemConfig,
    cfg: SchemeConfig,
    observers: Sequence[Callable[[int, float, StateVector], None]] = (),
    at: Optional[Iterable[int]] = None,
) -> EvolveResult:
    """
    Apply the selected step T/tau times starting from Pi_K U0.

    Args:
        U0: initial state (projected onto the grid of degree cfg.K)
        p: problem parameters
        cfg: scheme parameters; T must be a multiple of tau
        observers: callables invoked as observer(n, n*tau, U_n)
        at: step indices at which observers run (every step including 0 if None)

    Returns:
        EvolveResult with the final state and observer records

    Raises:
        ConfigurationError: if T is not a multiple of tau
        BlowUpError: if a step produces non-finite values
    """
    n_steps = cfg.steps_for()
    stepper = STEPPERS[cfg.scheme]
    U0 = to_grid(U0, cfg.K)
    wanted = None if at is None else {int(n) for n in at}

    use_shortcut = False
    band = shortcut_band(p, cfg)
    if cfg.shortcut:
        if cfg.K > band >= 1:
            use_shortcut = True
        else:
            logger.warning(f"Shortcut ignored: needs K > alpha*floor(cutoff) = {band}, got K={cfg.K}")

    def full_state(n: int, U: StateVector) -> StateVector:
        if not use_shortcut:
            return U
        return to_grid(U, cfg.K) + high_freq_shortcut(U0, n, p, cfg)

    def notify(n: int, U: StateVector):
        if wanted is not None and n not in wanted:
            return
        if not observers:
            return
        full = full_state(n, U)
        t = n * cfg.tau
        for observer in observers:
            observer(n, t, full)

    U = to_grid(U0, band) if use_shortcut else U0
    group = WaveGroup(U.grid, cfg.tau)
    logger.debug(
        f"Evolving {cfg.scheme} scheme: d={p.d}, K={cfg.K}, tau={cfg.tau}, "
        f"steps={n_steps}, shortcut={use_shortcut}"
    )
    notify(0, U)
    for n in range(1, n_steps + 1):
        U = stepper(U, p, cfg, n, group=group)
        notify(n, U)

    records = {}
    for observer in observers:
        result = getattr(observer, "result", None)
        if callable(result):
            records[getattr(observer, "name", type(observer).__name__)] = result()
    return EvolveResult(
        state=full_state(n_steps, U), steps=n_steps, shortcut_used=use_shortcut, records=records
    )