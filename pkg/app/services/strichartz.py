"""
Discrete Strichartz norms ||pi_N u||_{l^p_tau L^q} = (tau sum_n ||pi_N u(t_n)||_{L^q}^p)^(1/p).

A pair (p, q) is admissible with derivative loss gamma in dimension d when
p in (2, inf], q in [2, inf), 1/p + 1/q <= 1/2 and 1/p + d/q = d/2 - gamma.
"""

import logging
import math
from typing import Iterable, Optional, Union

from app.core.exceptions import AdmissibilityError
from app.models import StateVector, TorusField
from .integrators import Observer
from .spectral import lebesgue_norm, project

logger = logging.getLogger(__name__)

ADMISSIBILITY_ATOL = 1e-12


def check_admissible(p: float, q: float, d: int = 3, gamma: float = 1.0):
    """Raise AdmissibilityError unless (p, q) is admissible with loss gamma"""
    if not (p > 2.0):
        raise AdmissibilityError(f"Time exponent must lie in (2, inf], got p={p}")
    if not (2.0 <= q < math.inf):
        raise AdmissibilityError(f"Space exponent must lie in [2, inf), got q={q}")
    if 1.0 / p + 1.0 / q > 0.5 + ADMISSIBILITY_ATOL:
        raise AdmissibilityError(f"Pair ({p:g}, {q:g}) violates 1/p + 1/q <= 1/2")
    scaling = 1.0 / p + d / q
    if abs(scaling - (d / 2.0 - gamma)) > ADMISSIBILITY_ATOL:
        raise AdmissibilityError(
            f"Pair ({p:g}, {q:g}) violates 1/p + {d}/q = {d / 2.0 - gamma:g} (got {scaling:g})"
        )


def _field(item: Union[TorusField, StateVector]) -> TorusField:
    return item.u if isinstance(item, StateVector) else item


def strichartz_norm(
    trajectory: Iterable[Union[TorusField, StateVector]],
    tau: float,
    p: float,
    q: float,
    cutoff: float,
    d: Optional[int] = None,
    gamma: float = 1.0,
    length_scale: float = 1.0,
) -> float:
    """
    l^p_tau L^q norm of the filtered position component along a trajectory.

    Args:
        trajectory: fields (or states, whose u is used) at the times n*tau
        tau: time step of the trajectory
        p, q: exponent pair, checked for admissibility
        cutoff: frequency cutoff N of pi_N
        d: dimension for the admissibility check (taken from the data if None)
        gamma: derivative loss of the admissibility condition
        length_scale: 2*pi over the side of the torus the L^q norm is taken on
    """
    items = [_field(item) for item in trajectory]
    if d is None:
        d = items[0].grid.d if items else 3
    check_admissible(p, q, d, gamma)
    values = [lebesgue_norm(project(f, cutoff), q, length_scale) for f in items]
    if not values:
        return 0.0
    if math.isinf(p):
        return max(values)
    return (tau * sum(value ** p for value in values)) ** (1.0 / p)


class StrichartzAccumulator(Observer):
    """Accumulates a discrete Strichartz norm during an evolution without storing states"""

    def __init__(
        self, tau: float, p: float, q: float, cutoff: float, d: int = 3, gamma: float = 1.0, length_scale: float = 1.0
    ):
        check_admissible(p, q, d, gamma)
        self.tau = tau
        self.length_scale = length_scale
        self.p = p
        self.q = q
        self.cutoff = cutoff
        self.name = f"strichartz_{p:g}_{q:g}"
        self._total = 0.0
        self._count = 0

    def __call__(self, n: int, t: float, U: StateVector):
        value = lebesgue_norm(project(U.u, self.cutoff), self.q, self.length_scale)
        if math.isinf(self.p):
            self._total = max(self._total, value)
        else:
            self._total += value ** self.p
        self._count += 1

    @property
    def count(self) -> int:
        return self._count

    @property
    def value(self) -> float:
        if math.isinf(self.p) or self._count == 0:
            return self._total
        return (self.tau * self._total) ** (1.0 / self.p)

    def result(self) -> float:
        return self.value
