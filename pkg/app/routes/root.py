import logging
from fastapi import APIRouter

from app.core.config import settings

logger = logging.getLogger(__name__)

router = APIRouter()

@router.get("/")
async def root():
    # Root endpoint that provides basic application information.
    # Shows welcome message, version, and available endpoints.
    return {
        "message": f"Welcome to {settings.PROJECT_NAME}",
        "version": settings.VERSION,
        "debug_mode": settings.DEBUG_MODE,
        "endpoints": {
            "docs": "/docs",
            "health": "/health",
            "studies": f"{settings.API_V1_STR}/studies",
            "initial_data": f"{settings.API_V1_STR}/initial-data/diagnostics",
            "selftest": f"{settings.API_V1_STR}/selftest"
        },
        "status": "running"
    }

@router.get("/info")
async def app_info():
    # Experiment defaults and server settings.
    return {
        "project_name": settings.PROJECT_NAME,
        "version": settings.VERSION,
        "description": "Filtered Strang splitting for the semilinear wave equation on the torus",
        "api_version": settings.API_V1_STR,
        "max_api_degree": settings.MAX_API_DEGREE,
        "fft_workers": settings.FFT_WORKERS,
        "defaults": {
            "tau_ref": settings.DEFAULT_TAU_REF,
            "T": settings.DEFAULT_T,
            "eps": settings.DEFAULT_EPS,
            "target": settings.DEFAULT_TARGET,
            "seed": settings.DEFAULT_SEED,
            "fit_window": settings.DEFAULT_FIT_WINDOW,
            "tau_ratio": settings.DEFAULT_TAU_RATIO
        }
    }
