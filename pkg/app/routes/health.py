import logging

import numpy as np
import scipy
from fastapi import APIRouter, HTTPException

from app.models import GridSpec
from app.services.selftest import random_field
from app.services.spectral import from_physical, to_physical

logger = logging.getLogger(__name__)

router = APIRouter()

@router.get("/health")
async def health_check():
    # Comprehensive health check endpoint.
    # Runs a small FFT round trip and reports the numerical stack.
    health_status = {
        "status": "healthy",
        "checks": {},
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__}
    }

    # Test the transform pair on a small random field
    try:
        field = random_field(GridSpec(d=3, K=4), np.random.default_rng(0))
        back = from_physical(to_physical(field), field.grid)
        error = float(np.max(np.abs(back.coeff - field.coeff)) / np.max(np.abs(field.coeff)))
        if error > 1e-13:
            raise ValueError(f"round-trip error {error:.2e}")

        health_status["checks"]["fft"] = {
            "status": "healthy",
            "message": f"FFT round trip OK (relative error {error:.1e})"
        }
        logger.debug("Health check: FFT round trip OK")

    except Exception as e:
        health_status["status"] = "unhealthy"
        health_status["checks"]["fft"] = {
            "status": "unhealthy",
            "message": f"FFT round trip failed: {str(e)}"
        }
        logger.error(f"Health check: FFT round trip failed - {e}")

    # Return appropriate HTTP status
    if health_status["status"] == "unhealthy":
        raise HTTPException(status_code=503, detail=health_status)

    return health_status

@router.get("/health/simple")
async def simple_health_check():
    # Simple health check that just returns OK.
    # Useful for basic uptime monitoring.
    return {"status": "ok", "message": "Service is running"}
