import os
import logging
import sys
from pydantic_settings import BaseSettings
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    # API Configuration
    PROJECT_NAME: str = os.getenv("PROJECT_NAME", "Strang Wave Lab")
    VERSION: str = os.getenv("VERSION", "1.0.0")
    API_V1_STR: str = os.getenv("API_V1_STR", "/api/v1")

    # Server Configuration
    HOST: str = os.getenv("HOST", "127.0.0.1")
    PORT: int = int(os.getenv("PORT", "8000"))
    DEBUG_MODE: bool = os.getenv("DEBUG_MODE", "false").lower() == "true"

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO" if not os.getenv("DEBUG_MODE", "false").lower() == "true" else "DEBUG")
    LOG_FORMAT: str = os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s")
    LOG_FILE: str = os.getenv("LOG_FILE", "")  # Empty = console only

    # FFT Configuration
    FFT_WORKERS: int = int(os.getenv("FFT_WORKERS", "1"))

    # Experiment defaults
    DEFAULT_TAU_REF: float = float(os.getenv("DEFAULT_TAU_REF", str(2.0 ** -12)))
    DEFAULT_T: float = float(os.getenv("DEFAULT_T", "0.25"))
    DEFAULT_EPS: float = float(os.getenv("DEFAULT_EPS", "1e-4"))
    DEFAULT_TARGET: float = float(os.getenv("DEFAULT_TARGET", "3.0"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "20240601"))
    DEFAULT_FIT_WINDOW: int = int(os.getenv("DEFAULT_FIT_WINDOW", "8"))
    DEFAULT_TAU_RATIO: float = float(os.getenv("DEFAULT_TAU_RATIO", "0.8"))

    # Output
    REPORTS_DIR: str = os.getenv("REPORTS_DIR", "reports")

    # Largest spectral degree accepted over HTTP
    MAX_API_DEGREE: int = int(os.getenv("MAX_API_DEGREE", "16"))

    model_config = {'case_sensitive': True}

settings = Settings()

def setup_logging(level: str | None = None):
    """Configure logging for the entire application"""
    formatter = logging.Formatter(settings.LOG_FORMAT)
    level_name = (level or settings.LOG_LEVEL).upper()

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level_name))
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if settings.LOG_FILE:
        file_handler = logging.FileHandler(settings.LOG_FILE)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    if not settings.DEBUG_MODE:
        logging.getLogger("uvicorn.access").setLevel(logging.WARNING)

    logger = logging.getLogger(__name__)
    logger.info(f"Logging configured - Level: {level_name}")
    if settings.LOG_FILE:
        logger.info(f"Logging to file: {settings.LOG_FILE}")
