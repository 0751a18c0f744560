"""
Pydantic schemas for solver and experiment parameters.

This module defines the validated parameter objects passed between the CLI,
the solver and the noise generator.
"""

import math
from typing import ClassVar, Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.mesh import AREA_FLOOR


class SolverParams(BaseModel):
    """
    Parameters of the split Bregman iteration.

    Defaults reproduce the fandisk protocol: beta=0.01, lambda=0.1, one
    gradient step of length 0.01 per outer iteration, 200 outer iterations.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True, allow_inf_nan=False)

    beta: float = Field(default=0.01, gt=0, description="Weight of the total variation term")
    lambda_: float = Field(default=0.1, gt=0, alias="lambda", description="Penalty weight of the augmented Lagrangian")
    step_length: float = Field(default=0.01, gt=0, description="Gradient step length of the x-step")
    grad_steps_per_outer: int = Field(default=1, ge=1, description="Gradient steps per outer iteration")
    outer_iters: int = Field(default=200, ge=0, description="Number of outer iterations")
    area_floor: float = Field(default=AREA_FLOOR, ge=0, description="Minimal admissible triangle area")
    max_halvings: int = Field(default=30, ge=0, description="Step halvings before the x-step gives up")
    stop_on_convergence: bool = Field(default=False, description="Stop early once residual and change are tiny")
    residual_tol: float = Field(default=1e-6, gt=0)
    change_tol: float = Field(default=1e-8, gt=0)

    @property
    def threshold(self) -> float:
        """Shrinkage threshold beta / lambda."""
        return self.beta / self.lambda_


class NoiseSpec(BaseModel):
    """Gaussian noise in vertex-normal direction, sigma relative to the mean edge length."""
    model_config = ConfigDict(frozen=True)

    sigma_factor: float = Field(default=0.3, ge=0, description="Standard deviation in mean edge lengths")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Seed of the PCG64 generator")

    @field_validator("sigma_factor")
    @classmethod
    def validate_sigma_factor(cls, v):
        if not math.isfinite(v):
            raise ValueError("sigma_factor must be finite")
        return v


class IterationReport(BaseModel):
    """Telemetry of one outer iteration of the split Bregman method."""
    model_config = ConfigDict(frozen=True)

    outer_index: int = Field(ge=0)
    lagrangian: float
    tv: float = Field(ge=0)
    max_residual: float = Field(ge=0)
    min_area: float

    CSV_HEADER: ClassVar[Tuple[str, ...]] = ("outer", "lagrangian", "tv", "max_residual", "min_area")

    def as_row(self) -> Dict[str, object]:
        return {
            "outer": self.outer_index,
            "lagrangian": repr(self.lagrangian),
            "tv": repr(self.tv),
            "max_residual": repr(self.max_residual),
            "min_area": repr(self.min_area),
        }
