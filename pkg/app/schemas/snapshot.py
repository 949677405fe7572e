from typing import Literal

from pydantic import BaseModel, field_validator


class SnapshotHeader(BaseModel):
    """Sidecar header of a field snapshot blob"""
    d: int
    K: int
    real_flag: bool = True
    component: Literal["u", "v"] = "u"

    @field_validator('d')
    @classmethod
    def validate_dimension(cls, v):
        if v not in (1, 2, 3):
            raise ValueError(f'Invalid dimension: {v}. Must be 1, 2 or 3')
        return v

    @field_validator('K')
    @classmethod
    def validate_degree(cls, v):
        if v < 1:
            raise ValueError(f'Spectral degree must be at least 1, got {v}')
        return v
