"""
Database models for NormalTV.

This module defines the SQLAlchemy ORM models for the run history: one
SolverRun per CLI invocation and one IterationLog per outer iteration.
"""

from sqlalchemy import Column, String, Integer, Float, DateTime, ForeignKey, JSON, Enum as SQLEnum
from sqlalchemy.orm import declarative_base
from sqlalchemy.sql import func
import uuid
import enum

Base = declarative_base()


class CommandType(enum.Enum):
    """CLI commands that leave a run record."""
    ADD_NOISE = "add-noise"
    DENOISE = "denoise"
    INPAINT = "inpaint"
    MIN_SURFACE = "min-surface"
    TV = "tv"
    METRICS = "metrics"
    GENERATE = "generate"


class RunStatus(enum.Enum):
    """Status states for a run's lifecycle."""
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


class SolverRun(Base):
    """
    One invocation of a NormalTV command.

    Attributes:
        id: Unique identifier for the run
        command: Which command ran
        status: Current status of the run
        config: Effective configuration (JSON)
        input_path: Mesh the run started from
        output_path: Mesh the run wrote, if any
        started_at: When the run began
        completed_at: When the run finished or failed
        final_tv: TV of the normal of the final mesh
        final_lagrangian: Augmented Lagrangian after the last outer iteration
        error: Diagnostic of a failed run
    """
    __tablename__ = "solver_runs"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    command = Column(SQLEnum(CommandType, values_callable=lambda x: [e.value for e in x]), nullable=False)
    status = Column(SQLEnum(RunStatus, values_callable=lambda x: [e.value for e in x]), nullable=False, default=RunStatus.RUNNING)
    config = Column(JSON, nullable=True)
    input_path = Column(String, nullable=True)
    output_path = Column(String, nullable=True)
    started_at = Column(DateTime, server_default=func.now())
    completed_at = Column(DateTime, nullable=True)
    final_tv = Column(Float, nullable=True)
    final_lagrangian = Column(Float, nullable=True)
    error = Column(String, nullable=True)

    def __repr__(self):
        return f"<SolverRun(id={self.id}, command={self.command.value}, status={self.status.value})>"


class IterationLog(Base):
    """
    Telemetry of one outer iteration of a run.

    Attributes:
        id: Row identifier
        run_id: ID of the owning run
        outer_index: 0-based outer iteration
        lagrangian: Augmented Lagrangian after the b-step
        tv: TV of the normal of the iterate
        max_residual: max |d - s - b| over interior edges
        min_area: Smallest triangle area of the iterate
    """
    __tablename__ = "iteration_logs"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(String, ForeignKey("solver_runs.id"), nullable=False, index=True)
    outer_index = Column(Integer, nullable=False)
    lagrangian = Column(Float, nullable=False)
    tv = Column(Float, nullable=False)
    max_residual = Column(Float, nullable=False)
    min_area = Column(Float, nullable=False)

    def __repr__(self):
        return f"<IterationLog(run_id={self.run_id}, outer={self.outer_index}, tv={self.tv})>"
