"""
Tests for the CSV iteration telemetry.
"""

import csv

import pytest

from core.schemas import IterationReport
from core.telemetry import CsvTelemetry


def test_provenance_header_and_rows(tmp_path):
    path = tmp_path / "run.csv"
    report = IterationReport(outer_index=0, lagrangian=0.1 + 0.2, tv=18.84955592153876, max_residual=0.0, min_area=1e-3)
    with CsvTelemetry(path, {"command": "denoise", "beta": 0.01}) as telemetry:
        telemetry(report)
        telemetry(report.model_copy(update={"outer_index": 1}))
    assert telemetry.rows_written == 2

    lines = path.read_text().splitlines()
    assert lines[:2] == ["# command = denoise", "# beta = 0.01"]
    rows = list(csv.DictReader(lines[2:]))
    assert [row["outer"] for row in rows] == ["0", "1"]
    assert float(rows[0]["lagrangian"]) == 0.1 + 0.2
    assert float(rows[0]["tv"]) == 18.84955592153876


def test_reports_need_an_open_file(tmp_path):
    telemetry = CsvTelemetry(tmp_path / "closed.csv")
    with pytest.raises(RuntimeError):
        telemetry(IterationReport(outer_index=0, lagrangian=0.0, tv=0.0, max_residual=0.0, min_area=1.0))
