import logging

from fastapi import APIRouter

from app.schemas import DiagnosticsRequest, DiagnosticsResponse
from app.services.initial_data import diagnostics

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/diagnostics", response_model=DiagnosticsResponse)
def initial_data_diagnostics(request: DiagnosticsRequest):
    """Norms, shell spectra and L^q growth of the rough initial data"""
    logger.debug(f"Diagnostics for {request.spec.mode} data, d={request.d}, K={request.K}")
    return diagnostics(request)
