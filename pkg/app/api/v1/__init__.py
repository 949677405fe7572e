"""
API v1 endpoints
"""

from .studies import router as studies_router
from .initial_data import router as initial_data_router
from .selftest import router as selftest_router

__all__ = [
    "studies_router",
    "initial_data_router",
    "selftest_router"
]
