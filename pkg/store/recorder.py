"""
Run history recording for NormalTV.

This module stores one SolverRun per command invocation and, for solver
commands, one IterationLog per outer iteration.
"""

from datetime import datetime
from typing import Any, Dict, List, Optional
import logging

from core.schemas import IterationReport
from store.db import Database
from store.models import CommandType, IterationLog, RunStatus, SolverRun

logger = logging.getLogger(__name__)


class RunRecorder:
    """
    Records a single run and acts as an iteration listener for the solver.

    Args:
        database: Target database (tables are created on start)
        command: Command being run
        config: Effective configuration, stored as JSON
        input_path: Input mesh path, if any
        output_path: Output mesh path, if any
    """

    def __init__(
        self,
        database: Database,
        command: CommandType,
        config: Optional[Dict[str, Any]] = None,
        input_path: Optional[str] = None,
        output_path: Optional[str] = None,
    ):
        self.database = database
        self.command = command
        self.config = config or {}
        self.input_path = input_path
        self.output_path = output_path
        self.run_id: Optional[str] = None

    def start(self) -> str:
        """
        Create the run record.

        Returns:
            str: ID of the new run
        """
        self.database.init_db()
        with self.database.get_db_context() as db:
            run = SolverRun(
                command=self.command,
                status=RunStatus.RUNNING,
                config=self.config,
                input_path=self.input_path,
                output_path=self.output_path,
            )
            db.add(run)
            db.commit()
            self.run_id = run.id
        logger.info("Recording run %s (%s)", self.run_id, self.command.value)
        return self.run_id

    def __call__(self, report: IterationReport) -> None:
        if self.run_id is None:
            raise RuntimeError("RunRecorder.start() must be called before reports arrive")
        with self.database.get_db_context() as db:
            db.add(
                IterationLog(
                    run_id=self.run_id,
                    outer_index=report.outer_index,
                    lagrangian=report.lagrangian,
                    tv=report.tv,
                    max_residual=report.max_residual,
                    min_area=report.min_area,
                )
            )
            db.commit()

    def finish(self, final_tv: Optional[float] = None, final_lagrangian: Optional[float] = None):
        self._close(RunStatus.COMPLETED, final_tv=final_tv, final_lagrangian=final_lagrangian)

    def fail(self, error: str):
        self._close(RunStatus.FAILED, error=error)

    def _close(self, status: RunStatus, **fields):
        if self.run_id is None:
            return
        with self.database.get_db_context() as db:
            run = db.query(SolverRun).filter(SolverRun.id == self.run_id).first()
            if run is None:
                logger.warning("Run %s vanished before it could be closed", self.run_id)
                return
            run.status = status
            run.completed_at = datetime.utcnow()
            for key, value in fields.items():
                if value is not None:
                    setattr(run, key, value)
            db.commit()
        logger.info("Run %s %s", self.run_id, status.value)


def list_runs(database: Database, limit: int = 20) -> List[Dict[str, Any]]:
    """
    Most recent runs first, with their iteration counts.

    Returns:
        List of plain dictionaries (safe to use after the session closes)
    """
    database.init_db()
    with database.get_db_context() as db:
        runs = db.query(SolverRun).order_by(SolverRun.started_at.desc(), SolverRun.id).limit(limit).all()
        result = []
        for run in runs:
            iterations = db.query(IterationLog).filter(IterationLog.run_id == run.id).count()
            result.append(
                {
                    "id": run.id,
                    "command": run.command.value,
                    "status": run.status.value,
                    "started_at": run.started_at.isoformat() if run.started_at else None,
                    "iterations": iterations,
                    "final_tv": run.final_tv,
                    "output_path": run.output_path,
                }
            )
        return result


def get_iterations(database: Database, run_id: str) -> List[Dict[str, Any]]:
    """Iteration logs of one run in outer order."""
    with database.get_db_context() as db:
        logs = (
            db.query(IterationLog)
            .filter(IterationLog.run_id == run_id)
            .order_by(IterationLog.outer_index)
            .all()
        )
        return [
            {
                "outer": log.outer_index,
                "lagrangian": log.lagrangian,
                "tv": log.tv,
                "max_residual": log.max_residual,
                "min_area": log.min_area,
            }
            for log in logs
        ]
