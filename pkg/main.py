import logging
from contextlib import asynccontextmanager
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.core.config import settings, setup_logging
from app.core.exceptions import LabError
from app.routes.routes import router

setup_logging()
logger = logging.getLogger(__name__)

@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"Starting up {settings.PROJECT_NAME} v{settings.VERSION}")
    logger.info(f"FFT workers: {settings.FFT_WORKERS}, max API degree: {settings.MAX_API_DEGREE}")
    yield
    logger.info("Application shutdown complete")

# FastAPI app
app = FastAPI(
    title=settings.PROJECT_NAME,
    description="Filtered Strang splitting solver and convergence lab for the semilinear wave equation",
    version=settings.VERSION,
    openapi_url=f"{settings.API_V1_STR}/openapi.json",
    lifespan=lifespan
)

@app.exception_handler(LabError)
async def lab_exception_handler(request: Request, exc: LabError):
    logger.warning(f"{type(exc).__name__} on {request.url.path}: {exc.message}")
    return JSONResponse(
        status_code=exc.status_code,
        content={"detail": exc.message, "error": type(exc).__name__}
    )

app.include_router(router)

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "main:app", 
        host=settings.HOST, 
        port=settings.PORT, 
        reload=settings.DEBUG_MODE,
        log_config=None  # Use our custom logging config
    )
