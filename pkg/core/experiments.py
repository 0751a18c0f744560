"""
Reproducible experiment protocols on the unit cube.

Two protocols are provided: denoising a noisy 10x10-per-side cube with the
fandisk parameters, and inpainting a patch around one cube corner after
replacing it with its minimal surface.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from core.energy import tv_of_normal
from core.mask import VertexMask
from core.mesh import TriangleMesh
from core.metrics import max_box_deviation, mean_angular_error
from core.noise import add_normal_noise
from core.schemas import IterationReport, NoiseSpec, SolverParams
from core.shapes import cube_mesh
from core.solver import ReportListener, inpaint, minimal_surface_init, split_bregman

logger = logging.getLogger(__name__)

# 200 outer iterations with one gradient step each leave the corner flattened
CORNER_INPAINTING_PARAMS = SolverParams(outer_iters=1000, grad_steps_per_outer=5)


@dataclass
class DenoisingOutcome:
    truth: TriangleMesh
    noisy: TriangleMesh
    result: TriangleMesh
    reports: List[IterationReport] = field(default_factory=list)

    @property
    def noisy_error(self) -> float:
        return mean_angular_error(self.noisy, self.truth)

    @property
    def result_error(self) -> float:
        return mean_angular_error(self.result, self.truth)

    @property
    def error_ratio(self) -> float:
        return self.result_error / self.noisy_error


@dataclass
class InpaintingOutcome:
    truth: TriangleMesh
    mask: VertexMask
    initial: TriangleMesh
    result: TriangleMesh
    reports: List[IterationReport] = field(default_factory=list)

    @property
    def free_deviation(self) -> float:
        """Largest distance of a free vertex to the surface of the unit cube."""
        return max_box_deviation(self.result, indices=self.mask.free_indices)

    @property
    def initial_tv(self) -> float:
        return tv_of_normal(self.initial)

    @property
    def result_tv(self) -> float:
        return tv_of_normal(self.result)


def cube_denoising(
    resolution: int = 10,
    noise: Optional[NoiseSpec] = None,
    params: Optional[SolverParams] = None,
    listeners: Optional[List[ReportListener]] = None,
) -> DenoisingOutcome:
    """Add normal noise to a unit cube and denoise it with the noisy vertices as data."""
    noise = noise or NoiseSpec(sigma_factor=0.3, seed=1)
    params = params or SolverParams()
    truth = cube_mesh(resolution)
    noisy = add_normal_noise(truth, noise)
    result, reports = split_bregman(noisy, noisy.vertices, params, listeners=listeners)
    outcome = DenoisingOutcome(truth=truth, noisy=noisy, result=result, reports=reports)
    logger.info(
        "Cube denoising: angular error %.4f -> %.4f rad", outcome.noisy_error, outcome.result_error
    )
    return outcome


def corner_patch_mask(
    mesh: TriangleMesh,
    lower: Sequence[float] = (0.75, 0.75, 0.75),
    upper: Sequence[float] = (1.05, 1.05, 1.05),
) -> VertexMask:
    """Free the vertices inside a closed box around the cube corner (1, 1, 1)."""
    return VertexMask.from_box(mesh, lower, upper)


def cube_corner_inpainting(
    resolution: int = 10,
    lower: Sequence[float] = (0.75, 0.75, 0.75),
    params: Optional[SolverParams] = None,
    init_step: float = 0.05,
    init_iters: int = 200,
    listeners: Optional[List[ReportListener]] = None,
) -> InpaintingOutcome:
    """
    Free a patch around the corner (1, 1, 1), flatten it to its minimal
    surface and let split Bregman restore it with the connectivity kept.
    Defaults to CORNER_INPAINTING_PARAMS.
    """
    params = params or CORNER_INPAINTING_PARAMS
    truth = cube_mesh(resolution)
    upper = np.full(3, 1.0 + 1.0 / resolution)
    mask = corner_patch_mask(truth, lower, upper)
    initial = minimal_surface_init(
        truth, mask, init_step, init_iters, area_floor=params.area_floor, max_halvings=params.max_halvings
    )
    result, reports = inpaint(initial, mask, params, skip_init=True, listeners=listeners)
    outcome = InpaintingOutcome(truth=truth, mask=mask, initial=initial, result=result, reports=reports)
    logger.info(
        "Cube corner inpainting: %d free vertices, max deviation %.3e", len(mask), outcome.free_deviation
    )
    return outcome
