"""
Per-iteration CSV telemetry.

The file starts with ``# key = value`` provenance lines describing the
effective configuration, followed by a header row and one row per outer
iteration. Floats are written with repr so values survive a round trip.
"""

import csv
import logging
from pathlib import Path
from typing import Mapping, Optional, Union

from core.schemas import IterationReport

logger = logging.getLogger(__name__)


class CsvTelemetry:
    """
    Iteration listener that appends IterationReports to a CSV file.

    Use as a context manager; every row is flushed as it is written so a
    crashed run still leaves its history behind.
    """

    def __init__(self, path: Union[str, Path], provenance: Optional[Mapping[str, object]] = None):
        self.path = Path(path)
        self.provenance = dict(provenance or {})
        self._handle = None
        self._writer: Optional[csv.DictWriter] = None
        self.rows_written = 0

    def __enter__(self) -> "CsvTelemetry":
        self._handle = self.path.open("w", newline="", encoding="utf-8")
        for key, value in self.provenance.items():
            self._handle.write(f"# {key} = {value}\n")
        self._writer = csv.DictWriter(self._handle, fieldnames=list(IterationReport.CSV_HEADER))
        self._writer.writeheader()
        self._handle.flush()
        return self

    def __call__(self, report: IterationReport) -> None:
        if self._writer is None:
            raise RuntimeError("CsvTelemetry must be entered before it receives reports")
        self._writer.writerow(report.as_row())
        self._handle.flush()
        self.rows_written += 1

    def __exit__(self, exc_type, exc, tb):
        if self._handle is not None:
            self._handle.close()
            self._handle = None
            self._writer = None
        logger.info("Wrote %d telemetry rows to %s", self.rows_written, self.path)
        return False
