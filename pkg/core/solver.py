"""
Split Bregman solver for NormalTV.

This module runs the simplified split Bregman (ADMM) iteration for mesh
denoising (with a fidelity term) and mesh inpainting (fixed vertices outside
the patch, no fidelity term), and the minimal-surface initialisation of
inpainting patches.

One outer iteration is:
    x-step: a few gradient steps on x -> L(x, d, b)
    d-step: d_E = shrink(s_E + b_E, beta / lambda) on every interior edge
    b-step: b_E = b_E + s_E - d_E
"""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from core.energy import (
    BregmanVariables,
    area_gradient,
    augmented_lagrangian,
    lagrangian_gradient,
    signed_distances,
    tv_of_normal,
)
from core.errors import ConnectivityMismatchError, FoldedGeometryError, SolverError
from core.mask import VertexMask
from core.mesh import AREA_FLOOR, TriangleMesh
from core.schemas import IterationReport, SolverParams

logger = logging.getLogger(__name__)

ReportListener = Callable[[IterationReport], None]


def shrink(v, threshold: float):
    """Soft thresholding max(|v| - threshold, 0) * sign(v), elementwise."""
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def d_step(mesh: TriangleMesh, variables: BregmanVariables, params: SolverParams) -> BregmanVariables:
    """Exact minimisation of the augmented Lagrangian over d, edge by edge."""
    variables.check_keys(mesh)
    v = signed_distances(mesh) + variables.b
    return variables.with_values(d=shrink(v, params.threshold))


def b_step(mesh: TriangleMesh, variables: BregmanVariables) -> BregmanVariables:
    """Multiplier update b_E <- b_E + s_E - d_E."""
    variables.check_keys(mesh)
    return variables.with_values(b=variables.b + signed_distances(mesh) - variables.d)


def _find_defect(mesh: TriangleMesh, area_floor: float) -> Optional[Tuple[Optional[int], str]]:
    """Why an iterate is inadmissible, or None if it is fine."""
    areas = mesh.triangle_areas
    bad = np.flatnonzero(~(areas > area_floor))
    if bad.size:
        worst = int(bad[np.argmin(np.nan_to_num(areas[bad], nan=-1.0))])
        return worst, f"triangle {worst} has area {areas[worst]:.3e} <= floor {area_floor:.1e}"
    try:
        signed_distances(mesh)
    except FoldedGeometryError as exc:
        return None, str(exc)
    return None


def _descend(
    mesh: TriangleMesh,
    direction: np.ndarray,
    step_length: float,
    mask: VertexMask,
    area_floor: float,
    max_halvings: int,
) -> TriangleMesh:
    """
    Move the free vertices by -step_length * direction, halving the step
    until the iterate is admissible.

    Raises:
        SolverError: If no admissible step is found after max_halvings halvings
    """
    free = mask.free_indices
    x = mesh.vertices
    tau = step_length
    defect: Optional[Tuple[Optional[int], str]] = None
    for attempt in range(max_halvings + 1):
        moved = x.copy()
        moved[free] = x[free] - tau * direction[free]
        candidate = mesh.with_vertices(moved)
        defect = _find_defect(candidate, area_floor)
        if defect is None:
            if attempt:
                logger.warning("Step accepted with length %.3e after %d halvings", tau, attempt)
            return candidate
        logger.debug("Rejected step of length %.3e: %s", tau, defect[1])
        tau *= 0.5

    triangle, reason = defect
    raise SolverError(f"No admissible step after {max_halvings} halvings: {reason}", triangle=triangle)


def x_step(
    mesh: TriangleMesh,
    data: Optional[np.ndarray],
    variables: BregmanVariables,
    params: SolverParams,
    mask: Optional[VertexMask] = None,
) -> TriangleMesh:
    """
    Explicit gradient steps on x -> L(x, d, b), restricted to free vertices.

    Returns:
        TriangleMesh: New iterate; fixed vertices keep bit-identical positions

    Raises:
        SolverError: If a step cannot be made admissible
    """
    mask = mask if mask is not None else VertexMask.all(mesh.n_vertices)
    current = mesh
    for _ in range(params.grad_steps_per_outer):
        gradient = lagrangian_gradient(current, data, variables, params, mask)
        if not np.any(gradient):
            break
        current = _descend(current, gradient, params.step_length, mask, params.area_floor, params.max_halvings)
    return current


def minimal_surface_init(
    mesh: TriangleMesh,
    mask: VertexMask,
    step_length: float = 0.05,
    iters: int = 200,
    area_floor: float = AREA_FLOOR,
    max_halvings: int = 30,
) -> TriangleMesh:
    """
    Gradient descent on the total triangle area with respect to the free
    vertices; the patch boundary (all fixed vertices) stays in place.

    Raises:
        SolverError: If a step cannot be made admissible
    """
    mask.check(mesh)
    if not mask.free:
        return mesh
    start_area = mesh.total_area()
    current = mesh
    for _ in range(iters):
        gradient = area_gradient(current, mask)
        if not np.any(gradient):
            break
        current = _descend(current, gradient, step_length, mask, area_floor, max_halvings)
    logger.info("Minimal surface initialisation: area %.6f -> %.6f", start_area, current.total_area())
    return current


class SplitBregmanSolver:
    """
    Runs the split Bregman iteration from d = b = 0.

    Listeners are called with every IterationReport right after its outer
    iteration, which is how telemetry files and the run history are fed.

    Args:
        params: Solver parameters
        listeners: Callables receiving each IterationReport
    """

    def __init__(self, params: SolverParams, listeners: Optional[List[ReportListener]] = None):
        self.params = params
        self._listeners: List[ReportListener] = list(listeners or [])

    def add_listener(self, listener: ReportListener):
        self._listeners.append(listener)

    def solve(
        self,
        mesh: TriangleMesh,
        data: Optional[np.ndarray] = None,
        mask: Optional[VertexMask] = None,
    ) -> Tuple[TriangleMesh, List[IterationReport]]:
        """
        Run ``outer_iters`` outer iterations.

        Args:
            mesh: Initial iterate
            data: Data vertices (denoising) or None (inpainting)
            mask: Free vertices; all vertices when omitted

        Returns:
            Tuple of the final mesh and one report per outer iteration
        """
        params = self.params
        if data is not None:
            data = np.asarray(data, dtype=np.float64)
            if data.shape != mesh.vertices.shape:
                raise ConnectivityMismatchError(
                    f"Data vertices have shape {data.shape}, mesh vertices {mesh.vertices.shape}"
                )
        mask = mask if mask is not None else VertexMask.all(mesh.n_vertices)
        mask.check(mesh)

        mode = "denoising" if data is not None else "inpainting"
        logger.info(
            "Split Bregman %s: %d outer iterations, beta=%g, lambda=%g, step=%g, %d free vertices",
            mode, params.outer_iters, params.beta, params.lambda_, params.step_length, len(mask),
        )

        variables = BregmanVariables.zeros(mesh)
        reports: List[IterationReport] = []
        current = mesh
        for k in range(params.outer_iters):
            previous = current.vertices
            current = x_step(current, data, variables, params, mask)
            variables = d_step(current, variables, params)
            variables = b_step(current, variables)

            report = self._report(k, current, data, variables)
            reports.append(report)
            for listener in self._listeners:
                listener(report)
            logger.info(
                "Outer %d: L=%.8g tv=%.8g residual=%.3e min_area=%.3e",
                k, report.lagrangian, report.tv, report.max_residual, report.min_area,
            )

            if params.stop_on_convergence and self._converged(previous, current.vertices, report):
                logger.info("Converged after %d outer iterations", k + 1)
                break

        return current, reports

    def _report(
        self,
        outer_index: int,
        mesh: TriangleMesh,
        data: Optional[np.ndarray],
        variables: BregmanVariables,
    ) -> IterationReport:
        residual = variables.d - signed_distances(mesh) - variables.b
        return IterationReport(
            outer_index=outer_index,
            lagrangian=augmented_lagrangian(mesh, data, variables, self.params),
            tv=tv_of_normal(mesh),
            max_residual=float(np.max(np.abs(residual))) if residual.size else 0.0,
            min_area=mesh.min_area(),
        )

    def _converged(self, previous: np.ndarray, current: np.ndarray, report: IterationReport) -> bool:
        change = float(np.linalg.norm(current - previous))
        scale = max(float(np.linalg.norm(previous)), np.finfo(float).tiny)
        return report.max_residual < self.params.residual_tol and change / scale < self.params.change_tol


def split_bregman(
    mesh: TriangleMesh,
    data: Optional[np.ndarray],
    params: SolverParams,
    mask: Optional[VertexMask] = None,
    listeners: Optional[List[ReportListener]] = None,
) -> Tuple[TriangleMesh, List[IterationReport]]:
    """Denoise (data given) or inpaint (data None) with the split Bregman iteration."""
    return SplitBregmanSolver(params, listeners).solve(mesh, data, mask)


def inpaint(
    mesh: TriangleMesh,
    mask: VertexMask,
    params: SolverParams,
    init_step: float = 0.05,
    init_iters: int = 200,
    skip_init: bool = False,
    listeners: Optional[List[ReportListener]] = None,
) -> Tuple[TriangleMesh, List[IterationReport]]:
    """Fill the free patch: minimal-surface initialisation, then split Bregman without fidelity."""
    start = mesh
    if not skip_init:
        start = minimal_surface_init(
            mesh, mask, init_step, init_iters, area_floor=params.area_floor, max_halvings=params.max_halvings
        )
    return split_bregman(start, None, params, mask, listeners)
