import logging
from collections import defaultdict
from typing import List

from fastapi import APIRouter, HTTPException, status

from app.core.config import settings
from app.core.exceptions import FitError
from app.schemas import ConvergenceReport, FitRequest, FittedOrder, StudyConfig
from app.services.convergence import fit_order, run_study

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("", response_model=ConvergenceReport)
def create_study(config: StudyConfig):
    """
    Run a convergence study and return its report.

    - Spectral degrees are limited to MAX_API_DEGREE
    - Blow-ups are reported per row, not as errors
    """
    too_large = [K for K in config.K_list if K > settings.MAX_API_DEGREE]
    if too_large:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=f"Spectral degrees {too_large} exceed the limit {settings.MAX_API_DEGREE}"
        )
    logger.info(f"Study requested: K={config.K_list}, {len(config.tau_list)} step sizes")
    return run_study(config)


@router.post("/fit", response_model=List[FittedOrder])
def fit_orders(request: FitRequest):
    """Fit convergence orders for posted rows, one fit per K and norm"""
    by_degree = defaultdict(list)
    for row in request.rows:
        by_degree[row.K].append(row)

    fitted = []
    for K in sorted(by_degree):
        for norm in ("l2_hm1", "h1_l2"):
            try:
                order, residual, points = fit_order(by_degree[K], request.window, norm)
            except FitError as e:
                fitted.append(FittedOrder(K=K, norm=norm, window=request.window, message=e.message))
                continue
            fitted.append(FittedOrder(K=K, norm=norm, order=order, residual=residual, window=request.window,
                                      points=points))
    return fitted
