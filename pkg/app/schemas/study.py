from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings
from .initial_data import InitialDataSpec
from .problem import ProblemConfig, SchemeConfig

# relative tolerance when checking that a step is a whole multiple of tau_ref
MULTIPLE_RTOL = 1e-9

NormName = Literal["l2_hm1", "h1_l2"]


def _multiple_of(value: float, unit: float) -> int:
    """Integer m with m * unit == value (up to rounding), or 0 if there is none"""
    m = int(round(value / unit))
    if m < 1 or abs(m * unit - value) > MULTIPLE_RTOL * value:
        return 0
    return m


class StudyConfig(BaseModel):
    """Temporal convergence study: one reference run per K, one coarse run per tau"""
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    problem: ProblemConfig = ProblemConfig()
    K_list: List[int] = Field(min_length=1)
    tau_list: List[float] = Field(min_length=1)
    tau_ref: float = settings.DEFAULT_TAU_REF
    T: float = settings.DEFAULT_T
    data: InitialDataSpec = InitialDataSpec()
    fit_window: int = settings.DEFAULT_FIT_WINDOW
    scheme: Literal["strang", "lie"] = "strang"
    dealias: bool = False
    filter_cutoff: Optional[float] = None
    # None picks (6, 9) in d = 3 and nothing otherwise
    strichartz_pairs: Optional[List[Tuple[float, float]]] = None

    @field_validator('K_list')
    @classmethod
    def validate_degrees(cls, v):
        if any(K < 1 for K in v):
            raise ValueError(f'Spectral degrees must be at least 1, got {v}')
        return sorted(set(v))

    @field_validator('tau_ref')
    @classmethod
    def validate_tau_ref(cls, v):
        if not (0.0 < v <= 1.0):
            raise ValueError(f'Reference step must lie in (0, 1], got {v}')
        return v

    @field_validator('fit_window')
    @classmethod
    def validate_fit_window(cls, v):
        """An order fit needs at least two points"""
        if v < 2:
            raise ValueError(f'Fit window must contain at least 2 step sizes, got {v}')
        return v

    @model_validator(mode='after')
    def validate_time_grid(self):
        """Every tau and the horizon must be whole multiples of tau_ref"""
        for tau in self.tau_list:
            if not (0.0 < tau <= 1.0):
                raise ValueError(f'Step size must lie in (0, 1], got {tau}')
            if not _multiple_of(tau, self.tau_ref):
                raise ValueError(f'Step size {tau} is not a multiple of tau_ref={self.tau_ref}')
            if tau > self.T * (1.0 + MULTIPLE_RTOL):
                raise ValueError(f'Step size {tau} exceeds the horizon T={self.T}')
        if not _multiple_of(self.T, self.tau_ref):
            raise ValueError(f'Horizon T={self.T} is not a multiple of tau_ref={self.tau_ref}')
        if len(set(self.tau_list)) != len(self.tau_list):
            raise ValueError('Step sizes must be distinct')
        if self.problem.box == "unit" and max(self.tau_list) * self.problem.length_scale > 1.0:
            raise ValueError(f'Step sizes on the unit box must not exceed 1/(2*pi), got {max(self.tau_list)}')
        return self

    def ratio(self, tau: float) -> int:
        """tau / tau_ref as an exact integer"""
        return _multiple_of(tau, self.tau_ref)

    @property
    def reference_steps(self) -> int:
        return _multiple_of(self.T, self.tau_ref)

    @property
    def pairs(self) -> List[Tuple[float, float]]:
        """Exponent pairs of the Strichartz diagnostics"""
        if self.strichartz_pairs is not None:
            return list(self.strichartz_pairs)
        return [(6.0, 9.0)] if self.problem.d == 3 else []

    def scheme_for(self, K: int, tau: float) -> SchemeConfig:
        """
        Run configuration of one (K, tau) cell on the 2*pi-periodic grid.

        On the unit box the step and the horizon are stretched by 2*pi while the
        filter keeps the cutoff 1/tau in wavenumber units of [0, 1]^d.
        """
        scale = self.problem.length_scale
        cutoff = self.filter_cutoff
        if cutoff is None and self.problem.box == "unit":
            cutoff = 1.0 / tau
        return SchemeConfig(
            tau=tau * scale,
            T=self.T * scale,
            K=K,
            filter_cutoff=cutoff,
            scheme=self.scheme,
            dealias=self.dealias,
        )


class ReportRow(BaseModel):
    """Errors of one coarse run measured against the reference run"""
    alpha: int
    mu: int
    d: int
    K: int
    tau: float
    err_l2_hm1: Optional[float] = None
    err_h1_l2: Optional[float] = None
    steps: int
    walltime_s: float
    flag: Literal["ok", "blowup"] = "ok"
    blowup_step: Optional[int] = None

    @field_validator('err_l2_hm1', 'err_h1_l2')
    @classmethod
    def validate_error(cls, v):
        """Errors are nonnegative (None marks a run that blew up)"""
        if v is not None and v < 0:
            raise ValueError(f'Errors cannot be negative, got {v}')
        return v

    @property
    def usable(self) -> bool:
        return self.flag == "ok"

    def error(self, norm: NormName) -> Optional[float]:
        return self.err_l2_hm1 if norm == "l2_hm1" else self.err_h1_l2


class FittedOrder(BaseModel):
    """Least-squares slope of log(err) against log(tau) for one (K, norm)"""
    K: int
    norm: NormName
    order: Optional[float] = None
    residual: Optional[float] = None
    window: int
    points: int = 0
    message: Optional[str] = None


class StrichartzRecord(BaseModel):
    """l^p_tau L^q norm of the filtered reference trajectory"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    K: int
    p: float
    q: float
    cutoff: float
    value: float


class ConvergenceReport(BaseModel):
    """Outcome of run_study with everything needed to reproduce it"""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    rows: List[ReportRow] = []
    orders: List[FittedOrder] = []
    strichartz: List[StrichartzRecord] = []
    config: Optional[StudyConfig] = None
    tool_version: str = settings.VERSION
    metadata: Dict[str, Any] = {}

    @field_validator('rows')
    @classmethod
    def sort_rows(cls, v):
        """Rows ordered by K, then by descending tau"""
        return sorted(v, key=lambda row: (row.K, -row.tau))

    def rows_for(self, K: int) -> List[ReportRow]:
        return [row for row in self.rows if row.K == K]

    def order(self, K: int, norm: NormName) -> Optional[float]:
        for fitted in self.orders:
            if fitted.K == K and fitted.norm == norm:
                return fitted.order
        return None


class FitRequest(BaseModel):
    """Rows posted to the order-fit endpoint"""
    rows: List[ReportRow] = Field(min_length=1)
    window: int = settings.DEFAULT_FIT_WINDOW

    @field_validator('window')
    @classmethod
    def validate_window(cls, v):
        if v < 2:
            raise ValueError(f'Fit window must contain at least 2 step sizes, got {v}')
        return v
