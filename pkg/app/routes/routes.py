import logging
from fastapi import APIRouter

# Import standalone route modules
from .health import router as health_router
from .root import router as root_router

# Import API routes
from app.api.v1 import studies_router, initial_data_router, selftest_router
from app.core.config import settings

logger = logging.getLogger(__name__)

# Main application router
router = APIRouter()

# Include standalone routes (no prefix)
router.include_router(root_router, tags=["root"])
router.include_router(health_router, tags=["health"])

# Include API routes with prefixes
router.include_router(studies_router, prefix=f"{settings.API_V1_STR}/studies", tags=["studies"])
router.include_router(initial_data_router, prefix=f"{settings.API_V1_STR}/initial-data", tags=["initial-data"])
router.include_router(selftest_router, prefix=f"{settings.API_V1_STR}/selftest", tags=["selftest"])

logger.info("Main router configured with all routes")
