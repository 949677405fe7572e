from typing import Dict, Literal

from pydantic import BaseModel, ConfigDict, field_validator

from app.core.config import settings


class InitialDataSpec(BaseModel):
    """
    Rough initial data (u0, v0) with u0 just above H^1 and v0 just above L^2.

    Deterministic mode uses the coefficients (1+|k|^2)^(-(d/2+s+eps)/2),
    random mode multiplies them by uniform draws from [-1,1] + i[-1,1].
    """
    model_config = ConfigDict(frozen=True)

    mode: Literal["deterministic", "random"] = "deterministic"
    eps: float = settings.DEFAULT_EPS
    target_u: float = settings.DEFAULT_TARGET
    target_v: float = settings.DEFAULT_TARGET
    seed: int = settings.DEFAULT_SEED

    @field_validator('mode', mode='before')
    @classmethod
    def normalize_mode(cls, v):
        """Accept the short CLI spelling 'det'"""
        if v == "det":
            return "deterministic"
        return v

    @field_validator('eps')
    @classmethod
    def validate_eps(cls, v):
        if not (v > 0.0):
            raise ValueError(f'Regularity slack eps must be positive, got {v}')
        return v

    @field_validator('target_u', 'target_v')
    @classmethod
    def validate_target(cls, v):
        """Norm targets must be positive"""
        if not (v > 0.0):
            raise ValueError(f'Norm target must be positive, got {v}')
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if not (0 <= v < 2 ** 64):
            raise ValueError(f'Seed must be a 64-bit unsigned integer, got {v}')
        return v

    @property
    def s_u(self) -> float:
        """Regularity index of u0 (H^1 borderline)"""
        return 1.0 + self.eps

    @property
    def s_v(self) -> float:
        """Regularity index of v0 (L^2 borderline)"""
        return self.eps


class DiagnosticsRequest(BaseModel):
    """Initial data to analyse on a grid of dimension d and degree K"""
    spec: InitialDataSpec = InitialDataSpec()
    d: int = 3
    K: int = 8
    q: float = 8.0

    @field_validator('d')
    @classmethod
    def validate_dimension(cls, v):
        if v not in (1, 2, 3):
            raise ValueError(f'Invalid dimension: {v}. Must be 1, 2 or 3')
        return v

    @field_validator('K')
    @classmethod
    def validate_degree(cls, v):
        if not (1 <= v <= settings.MAX_API_DEGREE):
            raise ValueError(f'Spectral degree must lie in [1, {settings.MAX_API_DEGREE}], got {v}')
        return v

    @field_validator('q')
    @classmethod
    def validate_exponent(cls, v):
        if not (v >= 1.0):
            raise ValueError(f'Lebesgue exponent must be at least 1, got {v}')
        return v


class DiagnosticsResponse(BaseModel):
    """Norms and shell spectra of a constructed initial state"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    d: int
    K: int
    spatial_resolution: float
    norm_u_h1: float
    norm_v_l2: float
    norm_u_hs: float
    norm_v_hs: float
    product_h1_l2: float
    lebesgue_q: float
    lebesgue_u: Dict[int, float]
    spectrum_u: Dict[int, float]
    spectrum_v: Dict[int, float]
