import csv
import io
import logging
from pathlib import Path
from typing import List, Optional, Tuple

from app.schemas import ConvergenceReport, ReportRow
from .base import FileStoreBase, PathLike

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("alpha", "mu", "d", "K", "tau", "err_l2_hm1", "err_h1_l2", "steps", "walltime_s", "flag")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ReportStore(FileStoreBase[ConvergenceReport]):
    def to_csv(self, report: ConvergenceReport) -> str:
        """CSV text with one line per row, in report order"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([_cell(getattr(row, column)) for column in CSV_COLUMNS])
        return buffer.getvalue()

    def write_report(
        self, report: ConvergenceReport, csv_path: Optional[PathLike] = None, json_path: Optional[PathLike] = None
    ) -> Tuple[Optional[Path], Optional[Path]]:
        """Write the CSV table and/or the full JSON report"""
        written_csv = self.write_text(csv_path, self.to_csv(report)) if csv_path is not None else None
        written_json = self.write_model(json_path, report) if json_path is not None else None
        for path in (written_csv, written_json):
            if path is not None:
                logger.info(f"Report written to {path}")
        return written_csv, written_json

    def read_report(self, json_path: PathLike) -> ConvergenceReport:
        return self.read_model(json_path)

    def read_rows(self, csv_path: PathLike) -> List[ReportRow]:
        """Rows of a CSV table written by write_report"""
        reader = csv.DictReader(io.StringIO(self.read_text(csv_path)))
        rows = []
        for record in reader:
            data = {key: (value if value != "" else None) for key, value in record.items()}
            rows.append(ReportRow(**data))
        return rows


report_store = ReportStore(ConvergenceReport)


def write_report(
    report: ConvergenceReport, csv_path: Optional[PathLike] = None, json_path: Optional[PathLike] = None
) -> Tuple[Optional[Path], Optional[Path]]:
    return report_store.write_report(report, csv_path, json_path)


def read_report(json_path: PathLike) -> ConvergenceReport:
    return report_store.read_report(json_path)
