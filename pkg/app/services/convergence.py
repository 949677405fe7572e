"""
Temporal convergence studies against a fine-step reference run.

For every spectral degree K one reference evolution with step tau_ref is run.
Each coarse run with tau = m * tau_ref is advanced in the same sweep whenever
the reference step index is a multiple of m, so both runs are compared at
exactly the same discrete times (integer step counts, no accumulated time).
The errors are running maxima over all compared times n*tau <= T, n = 0
included, in the two product norms L2 x H^-1 and H^1 x L2.
"""

import logging
import math
import platform
import sys
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

from app.core.config import settings
from app.core.exceptions import BlowUpError, ConfigurationError, FitError
from app.models import PRODUCT_H1_L2, PRODUCT_L2_HM1, GridSpec, NormKind, StateVector
from app.schemas import (
    ConvergenceReport,
    FittedOrder,
    ReportRow,
    SchemeConfig,
    StrichartzRecord,
    StudyConfig,
)
from .initial_data import make_initial_state
from .integrators import STEPPERS
from .propagator import WaveGroup
from .spectral import product_norm
from .strichartz import StrichartzAccumulator

logger = logging.getLogger(__name__)

# twenty roughly geometric step sizes from 1/8 down to 1/512, all multiples of 2^-12
GEOMETRIC_TAU_PRESET: Tuple[float, ...] = (
    0.125,
    0.100341796875,
    0.08056640625,
    0.06494140625,
    0.052001953125,
    0.041748046875,
    0.03369140625,
    0.027099609375,
    0.021728515625,
    0.017333984375,
    0.013916015625,
    0.01123046875,
    0.009033203125,
    0.00732421875,
    0.005859375,
    0.004638671875,
    0.003662109375,
    0.0029296875,
    0.00244140625,
    0.001953125,
)

TAU_PRESETS: Dict[str, Tuple[float, ...]] = {"geometric20": GEOMETRIC_TAU_PRESET}

NORMS: Dict[str, NormKind] = {
    "l2_hm1": PRODUCT_L2_HM1,
    "h1_l2": PRODUCT_H1_L2,
}


def plan_tau_grid(tau_max: float, tau_min: float, ratio: float, tau_ref: float) -> List[float]:
    """
    Geometric step sizes tau_max, tau_max*ratio, ... down to tau_min, each
    rounded to the nearest positive multiple of tau_ref and deduplicated.

    Raises:
        ConfigurationError: on an invalid range or ratio, or an empty result
    """
    if not (0.0 < tau_min < tau_max <= 1.0):
        raise ConfigurationError(f"Need 0 < tau_min < tau_max <= 1, got tau_min={tau_min}, tau_max={tau_max}")
    if not (0.0 < ratio < 1.0):
        raise ConfigurationError(f"Ratio must lie in (0, 1), got {ratio}")
    if not (0.0 < tau_ref <= tau_max):
        raise ConfigurationError(f"Reference step must lie in (0, tau_max], got {tau_ref}")

    taus: List[float] = []
    t = tau_max
    while t >= tau_min * (1.0 - 1e-12):
        tau = max(1, int(round(t / tau_ref))) * tau_ref
        if tau in taus:
            logger.warning(f"Dropping duplicate step size {tau} (from {t})")
        else:
            taus.append(tau)
        t *= ratio
    if not taus:
        raise ConfigurationError("Step-size grid is empty")
    return taus


def error_norm(A: StateVector, B: StateVector, kind: NormKind, length_scale: float = 1.0) -> float:
    """product_norm(A - B, kind); grids must agree"""
    return product_norm(A - B, kind, length_scale)


def fit_order(rows: Sequence[ReportRow], window: int, norm: str = "l2_hm1") -> Tuple[float, float, int]:
    """
    Least-squares slope of log(err) against log(tau) over the `window` largest
    step sizes of the rows that did not blow up.

    Returns:
        (slope, residual, points) with the residual the RMS deviation in
        log(err) and points the number of errors actually fitted

    Raises:
        FitError: if fewer than two rows in the window have a positive error
    """
    candidates = sorted((row for row in rows if row.usable), key=lambda row: -row.tau)[:window]
    points = [
        (row.tau, row.error(norm))
        for row in candidates
        if row.error(norm) is not None and row.error(norm) > 0 and math.isfinite(row.error(norm))
    ]
    if len(points) < 2:
        raise FitError(f"Need at least 2 positive errors to fit an order, got {len(points)}")
    x = np.log([tau for tau, _ in points])
    y = np.log([err for _, err in points])
    design = np.column_stack([x, np.ones_like(x)])
    coeffs, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ coeffs - y) ** 2)))
    return float(coeffs[0]), residual, len(points)


def fitted_orders(K: int, rows: Sequence[ReportRow], window: int) -> List[FittedOrder]:
    """Orders in both norms; a failed fit is recorded with its message"""
    out = []
    for norm in NORMS:
        try:
            order, residual, points = fit_order(rows, window, norm)
            out.append(FittedOrder(K=K, norm=norm, order=order, residual=residual, window=window, points=points))
        except FitError as e:
            logger.warning(f"No {norm} order for K={K}: {e.message}")
            out.append(FittedOrder(K=K, norm=norm, window=window, message=e.message))
    return out


class _CoarseRun:
    """State and running error maxima of one coarse step size"""

    def __init__(self, tau: float, m: int, cfg: SchemeConfig, U0: StateVector, length_scale: float = 1.0):
        self.tau = tau
        self.m = m
        self.cfg = cfg
        self.length_scale = length_scale
        # the reference run (m == 1) never steps this state
        self.group = WaveGroup(U0.grid, cfg.tau) if m > 1 else None
        self.state = U0
        self.steps = 0
        self.errors = {norm: 0.0 for norm in NORMS}
        self.walltime = 0.0
        self.blowup_step: Optional[int] = None

    @property
    def alive(self) -> bool:
        return self.blowup_step is None

    def compare(self, reference: StateVector):
        for name, kind in NORMS.items():
            self.errors[name] = max(self.errors[name], error_norm(reference, self.state, kind, self.length_scale))


def _lockstep(cfg: StudyConfig, K: int) -> Tuple[List[ReportRow], List[StrichartzRecord]]:
    p = cfg.problem
    grid = GridSpec(d=p.d, K=K)
    scale = p.length_scale
    U0 = make_initial_state(cfg.data, grid, length_scale=scale)
    stepper = STEPPERS[cfg.scheme]
    ref_cfg = cfg.scheme_for(K, cfg.tau_ref)
    n_ref = cfg.reference_steps

    ref_group = WaveGroup(grid, ref_cfg.tau)

    runs = [_CoarseRun(tau, cfg.ratio(tau), cfg.scheme_for(K, tau), U0, scale) for tau in cfg.tau_list]
    accumulators = [
        StrichartzAccumulator(cfg.tau_ref, pq[0], pq[1], K, d=p.d, length_scale=scale) for pq in cfg.pairs
    ]

    U_ref = U0
    ref_walltime = 0.0
    ref_blowup: Optional[int] = None
    for acc in accumulators:
        acc(0, 0.0, U_ref)

    for n in range(1, n_ref + 1):
        start = time.perf_counter()
        try:
            U_ref = stepper(U_ref, p, ref_cfg, n, group=ref_group)
        except BlowUpError as e:
            logger.warning(f"Reference run blew up at step {e.step} (K={K}, tau_ref={cfg.tau_ref})")
            ref_blowup = e.step
            break
        ref_walltime += time.perf_counter() - start
        for acc in accumulators:
            acc(n, n * cfg.tau_ref, U_ref)

        for run in runs:
            if not run.alive or n % run.m != 0:
                continue
            if run.m == 1:
                # the coarse run is the reference run
                run.steps += 1
                continue
            start = time.perf_counter()
            try:
                run.state = stepper(run.state, p, run.cfg, run.steps + 1, group=run.group)
            except BlowUpError as e:
                logger.warning(f"Run with tau={run.tau} blew up at step {e.step} (K={K})")
                run.blowup_step = e.step
                continue
            run.walltime += time.perf_counter() - start
            run.steps += 1
            run.compare(U_ref)

    rows = []
    for run in runs:
        blowup_step = ref_blowup if ref_blowup is not None else run.blowup_step
        ok = blowup_step is None
        rows.append(
            ReportRow(
                alpha=p.alpha,
                mu=p.mu,
                d=p.d,
                K=K,
                tau=run.tau,
                err_l2_hm1=run.errors["l2_hm1"] if ok else None,
                err_h1_l2=run.errors["h1_l2"] if ok else None,
                steps=run.steps,
                walltime_s=ref_walltime if run.m == 1 else run.walltime,
                flag="ok" if ok else "blowup",
                blowup_step=blowup_step,
            )
        )

    strichartz = []
    if ref_blowup is None:
        strichartz = [
            StrichartzRecord(K=K, p=acc.p, q=acc.q, cutoff=float(K), value=acc.value) for acc in accumulators
        ]
    return rows, strichartz


def environment_metadata(cfg: Optional[StudyConfig] = None) -> Dict[str, Any]:
    """Versions, platform and the conventions a study depends on"""
    metadata: Dict[str, Any] = {
        "tool": settings.PROJECT_NAME,
        "tool_version": settings.VERSION,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
        "decisions": {
            "product_norm": "euclidean",
            "random_r0": "real part kept, r_-k = conj(r_k)",
            "scaling_grid": "working K",
            "filter_floor_slack": 1e-12,
        },
    }
    if cfg is not None:
        metadata["decisions"]["box"] = cfg.problem.box
        metadata["decisions"]["eps"] = cfg.data.eps
        metadata["spatial_resolution"] = {str(K): GridSpec(d=cfg.problem.d, K=K).spatial_resolution
                                          for K in cfg.K_list}
    return metadata


def run_study(cfg: StudyConfig) -> ConvergenceReport:
    """
    Run the lockstep study for every K in cfg.K_list.

    Blow-ups are recorded per row (flag "blowup", errors None) and excluded
    from the order fits; they never abort the study.

    Raises:
        AdmissibilityError: if a configured Strichartz pair is not admissible
    """
    p = cfg.problem
    logger.info(
        f"Starting study: alpha={p.alpha}, mu={p.mu}, d={p.d}, K={cfg.K_list}, "
        f"{len(cfg.tau_list)} step sizes, tau_ref={cfg.tau_ref}, T={cfg.T}"
    )
    rows: List[ReportRow] = []
    orders: List[FittedOrder] = []
    strichartz: List[StrichartzRecord] = []
    for K in cfg.K_list:
        start = time.perf_counter()
        rows_K, strichartz_K = _lockstep(cfg, K)
        rows.extend(rows_K)
        strichartz.extend(strichartz_K)
        orders.extend(fitted_orders(K, rows_K, cfg.fit_window))
        logger.info(f"K={K} done in {time.perf_counter() - start:.2f}s")

    report = ConvergenceReport(
        rows=rows,
        orders=orders,
        strichartz=strichartz,
        config=cfg,
        tool_version=settings.VERSION,
        metadata=environment_metadata(cfg),
    )
    logger.info(f"Study finished: {len(report.rows)} rows")
    return report
