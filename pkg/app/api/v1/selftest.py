import logging
from typing import List, Optional

from fastapi import APIRouter, HTTPException, Query, status

from app.services.selftest import SelfTestReport, available_checks, run_selftest

logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("", response_model=SelfTestReport)
def selftest(checks: Optional[List[str]] = Query(None)):
    """
    Run the property suite (or the named checks).

    Returns 500 with the full report as detail if any check fails.
    """
    unknown = [name for name in checks or [] if name not in available_checks()]
    if unknown:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Unknown checks: {unknown}")

    report = run_selftest(checks)
    if not report.passed:
        logger.error(f"Selftest failed: {[result.name for result in report.failures]}")
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=report.model_dump())
    return report


@router.get("/checks", response_model=List[str])
def list_checks():
    return available_checks()
