from .report import report_store, write_report, read_report
from .snapshot import snapshot_store, write_snapshot, read_snapshot

# Export all stores for easy imports
__all__ = [
    "report_store",
    "write_report",
    "read_report",
    "snapshot_store",
    "write_snapshot",
    "read_snapshot"
]
