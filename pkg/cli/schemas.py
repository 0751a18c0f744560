"""
Pydantic schemas for CLI configuration.

This module defines RunConfig, the validated effective configuration of one
command invocation after defaults, config file, preset and flags have been
merged.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.mesh import AREA_FLOOR
from core.mesh_io import MeshFileType
from core.schemas import NoiseSpec, SolverParams


class Command(str, Enum):
    """Commands of the normaltv CLI."""
    ADD_NOISE = "add-noise"
    DENOISE = "denoise"
    INPAINT = "inpaint"
    TV = "tv"
    MIN_SURFACE = "min-surface"
    METRICS = "metrics"
    GENERATE = "generate"
    RUNS = "runs"


class Preset(str, Enum):
    """Published parameter sets."""
    FANDISK = "fandisk"
    BUNNY_LOW = "bunny-low"
    BUNNY_HIGH = "bunny-high"


class ShapeType(str, Enum):
    """Shapes the generate command can build."""
    CUBE = "cube"
    CHOPPED_CUBE = "chopped-cube"
    GRID = "grid"
    DOME = "dome"
    ICOSAHEDRON = "icosahedron"


PRESETS: Dict[Preset, Dict[str, float]] = {
    Preset.FANDISK: {"beta": 0.01, "lambda_": 0.1},
    Preset.BUNNY_LOW: {"beta": 0.003, "lambda_": 0.01},
    Preset.BUNNY_HIGH: {"beta": 0.01, "lambda_": 0.01},
}

NEEDS_INPUT = {
    Command.ADD_NOISE, Command.DENOISE, Command.INPAINT, Command.TV, Command.MIN_SURFACE, Command.METRICS,
}
NEEDS_OUTPUT = {Command.ADD_NOISE, Command.DENOISE, Command.INPAINT, Command.MIN_SURFACE, Command.GENERATE}
NEEDS_MASK = {Command.INPAINT, Command.MIN_SURFACE}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class RunConfig(BaseModel):
    """Effective configuration of one CLI invocation."""
    model_config = ConfigDict(populate_by_name=True, extra="forbid", allow_inf_nan=False)

    command: Command = Field(description="Command to run")
    input: Optional[Path] = Field(default=None, description="Input mesh")
    output: Optional[Path] = Field(default=None, description="Output mesh")
    data: Optional[Path] = Field(default=None, description="Data mesh for the fidelity term (denoise)")
    reference: Optional[Path] = Field(default=None, description="Ground-truth mesh (metrics)")
    mask: Optional[Path] = Field(default=None, description="File with free vertex indices")
    mask_from_box: Optional[Tuple[float, float, float, float, float, float]] = Field(
        default=None, description="Free vertices inside x0,y0,z0,x1,y1,z1"
    )

    beta: float = Field(default=0.01, gt=0)
    lambda_: float = Field(default=0.1, gt=0, alias="lambda")
    step: float = Field(default=0.01, gt=0)
    grad_steps: int = Field(default=1, ge=1)
    outer: int = Field(default=200, ge=0)
    area_floor: float = Field(default=AREA_FLOOR, ge=0)
    preset: Optional[Preset] = None

    sigma_factor: float = Field(default=0.3, ge=0)
    seed: int = Field(default=0, ge=0, lt=2**64)

    skip_min_surface: bool = False
    min_surface_step: float = Field(default=0.05, gt=0)
    min_surface_iters: int = Field(default=200, ge=0)

    telemetry: Optional[Path] = None
    db: Optional[str] = None
    format: Optional[MeshFileType] = None
    log_level: str = "WARNING"

    shape: ShapeType = ShapeType.CUBE
    resolution: int = Field(default=10, ge=1)
    size: float = Field(default=1.0, gt=0)
    limit: int = Field(default=20, ge=1)

    @field_validator("mask_from_box", mode="before")
    @classmethod
    def split_box(cls, v):
        if isinstance(v, str):
            parts = [p for p in v.replace(",", " ").split() if p]
            if len(parts) != 6:
                raise ValueError("mask_from_box needs six numbers: x0,y0,z0,x1,y1,z1")
            return tuple(float(p) for p in parts)
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        return level

    @model_validator(mode="after")
    def check_command_arguments(self):
        name = self.command.value
        if self.command in NEEDS_INPUT and self.input is None:
            raise ValueError(f"{name} requires --input")
        if self.command in NEEDS_OUTPUT and self.output is None:
            raise ValueError(f"{name} requires --output")
        if self.command == Command.METRICS and self.reference is None:
            raise ValueError("metrics requires --reference")
        if self.data is not None and self.command != Command.DENOISE:
            raise ValueError("--data is only valid with denoise")
        if self.command in NEEDS_MASK:
            if (self.mask is None) == (self.mask_from_box is None):
                raise ValueError(f"{name} requires exactly one of --mask and --mask-from-box")
        if self.mask_from_box is not None:
            lower, upper = self.mask_from_box[:3], self.mask_from_box[3:]
            if any(lo > hi for lo, hi in zip(lower, upper)):
                raise ValueError("mask_from_box lower corner must not exceed the upper corner")
        return self

    def solver_params(self) -> SolverParams:
        return SolverParams(
            beta=self.beta,
            lambda_=self.lambda_,
            step_length=self.step,
            grad_steps_per_outer=self.grad_steps,
            outer_iters=self.outer,
            area_floor=self.area_floor,
        )

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(sigma_factor=self.sigma_factor, seed=self.seed)

    def provenance(self) -> Dict[str, Any]:
        """Effective configuration as JSON-compatible values, unset options omitted."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)
