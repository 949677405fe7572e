from .problem import ProblemConfig, SchemeConfig
from .initial_data import InitialDataSpec, DiagnosticsRequest, DiagnosticsResponse
from .snapshot import SnapshotHeader
from .study import (
    StudyConfig,
    ReportRow,
    FittedOrder,
    StrichartzRecord,
    ConvergenceReport,
    FitRequest,
)

# Export all schemas for easy imports
__all__ = [
    # Run configuration
    "ProblemConfig",
    "SchemeConfig",

    # Initial data
    "InitialDataSpec",
    "DiagnosticsRequest",
    "DiagnosticsResponse",

    # Convergence studies
    "StudyConfig",
    "ReportRow",
    "FittedOrder",
    "StrichartzRecord",
    "ConvergenceReport",
    "FitRequest",

    # Snapshots
    "SnapshotHeader"
]
