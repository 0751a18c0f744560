"""
Command-line interface for NormalTV.

This module parses the command line, merges it with an optional config file
and preset into a RunConfig, and dispatches to one handler per command.
Results go to stdout as ``key=value`` lines with floats in repr form;
diagnostics go to stderr through logging.
"""

import argparse
import contextlib
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError
from sqlalchemy.exc import SQLAlchemyError

from cli.config_file import read_config_file
from cli.schemas import PRESETS, Command, Preset, RunConfig, ShapeType
from core.energy import BregmanVariables, augmented_lagrangian, denoising_objective, tesa, tv_of_normal
from core.errors import ConnectivityMismatchError, NormalTVError
from core.mask import VertexMask
from core.mesh import TriangleMesh, mean_edge_length
from core.mesh_io import MeshFileType, load_mesh, save_mesh
from core.metrics import mean_angular_error, vertex_l2_error
from core.noise import add_normal_noise
from core.schemas import IterationReport, SolverParams
from core.shapes import chopped_cube_mesh, cube_mesh, dome_patch, flat_grid, icosahedron
from core.solver import ReportListener, inpaint, minimal_surface_init, split_bregman
from core.telemetry import CsvTelemetry
from store.db import DEFAULT_DATABASE_URL, Database, database_url_from_env
from store.models import CommandType
from store.recorder import RunRecorder, list_runs

logger = logging.getLogger("normaltv.cli")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

Results = Dict[str, object]
Handler = Callable[[RunConfig, List[ReportListener]], Results]


# ------------------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------------------
def _add_common_options(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="File with 'key = value' lines; flags override it")
    parser.add_argument("--log-level", type=str.upper, help="Logging level on stderr (default WARNING)")
    parser.add_argument("--db", help="SQLAlchemy URL of the run history (default: $NORMALTV_DATABASE_URL)")


def _add_mesh_options(parser: argparse.ArgumentParser, output: bool = True):
    parser.add_argument("--input", help="Input mesh (.obj or .ply)")
    if output:
        parser.add_argument("--output", help="Output mesh (.obj or .ply)")
        parser.add_argument(
            "--format", choices=[t.value for t in MeshFileType], help="Output format (default: from suffix)"
        )
    parser.add_argument("--area-floor", type=float, help="Minimal admissible triangle area")


def _add_solver_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("solver")
    group.add_argument("--beta", type=float, help="Weight of the TV term (default 0.01)")
    group.add_argument("--lambda", dest="lambda_", type=float, help="Penalty weight (default 0.1)")
    group.add_argument("--step", type=float, help="Gradient step length (default 0.01)")
    group.add_argument("--grad-steps", type=int, help="Gradient steps per outer iteration (default 1)")
    group.add_argument("--outer", type=int, help="Outer iterations (default 200)")
    group.add_argument("--preset", choices=[p.value for p in Preset], help="Published beta/lambda pair")
    group.add_argument("--telemetry", help="Write per-iteration CSV telemetry here")


def _add_mask_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("mask")
    group.add_argument("--mask", help="File with free vertex indices, one per line")
    group.add_argument("--mask-from-box", metavar="X0,Y0,Z0,X1,Y1,Z1", help="Free the vertices inside a box")


def _add_min_surface_options(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("minimal surface")
    group.add_argument("--min-surface-step", type=float, help="Step length (default 0.05)")
    group.add_argument("--min-surface-iters", type=int, help="Iterations (default 200)")


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser.

    Every option defaults to argparse.SUPPRESS so the namespace only holds
    what was given on the command line.
    """
    parser = argparse.ArgumentParser(
        prog="normaltv",
        description="Mesh denoising and inpainting by total variation of the normal",
        argument_default=argparse.SUPPRESS,
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def add(command: Command, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(command.value, help=help_text, argument_default=argparse.SUPPRESS)
        _add_common_options(sub)
        return sub

    sub = add(Command.ADD_NOISE, "Displace vertices along their normals by Gaussian noise")
    _add_mesh_options(sub)
    sub.add_argument("--sigma-factor", type=float, help="Noise level in mean edge lengths (default 0.3)")
    sub.add_argument("--seed", type=int, help="Seed of the PCG64 generator (default 0)")

    sub = add(Command.DENOISE, "Denoise a mesh with the split Bregman iteration")
    _add_mesh_options(sub)
    sub.add_argument("--data", help="Data mesh for the fidelity term (default: the input)")
    _add_solver_options(sub)

    sub = add(Command.INPAINT, "Fill a masked patch, keeping all other vertices fixed")
    _add_mesh_options(sub)
    _add_mask_options(sub)
    _add_solver_options(sub)
    _add_min_surface_options(sub)
    sub.add_argument("--skip-min-surface", action="store_true", help="Start from the input geometry")

    sub = add(Command.MIN_SURFACE, "Replace a masked patch by a minimal surface")
    _add_mesh_options(sub)
    _add_mask_options(sub)
    _add_min_surface_options(sub)

    sub = add(Command.TV, "Print the total variation of the normal")
    _add_mesh_options(sub, output=False)

    sub = add(Command.METRICS, "Compare a mesh with a reference mesh")
    _add_mesh_options(sub, output=False)
    sub.add_argument("--reference", help="Ground-truth mesh with the same connectivity")

    sub = add(Command.GENERATE, "Write a procedural test mesh")
    sub.add_argument("--shape", choices=[s.value for s in ShapeType], help="Shape (default cube)")
    sub.add_argument("--resolution", type=int, help="Subdivisions (default 10)")
    sub.add_argument("--size", type=float, help="Edge length or radius (default 1)")
    sub.add_argument("--output", help="Output mesh (.obj or .ply)")
    sub.add_argument("--format", choices=[t.value for t in MeshFileType], help="Output format")

    sub = add(Command.RUNS, "List the recorded run history")
    sub.add_argument("--limit", type=int, help="Number of runs to list (default 20)")

    return parser


def build_config(namespace: argparse.Namespace) -> RunConfig:
    """
    Merge defaults < config file < preset < command-line flags.

    A preset only fills beta and lambda when neither the config file nor a
    flag set them.

    Raises:
        ValidationError: If the merged values are invalid
        ConfigFileError, OSError: If the config file cannot be used
    """
    given = dict(vars(namespace))
    config_path = given.pop("config", None)

    merged: Dict[str, object] = {}
    if config_path is not None:
        merged.update(read_config_file(config_path))
    merged.update(given)

    preset = merged.get("preset")
    if preset is not None:
        for key, value in PRESETS[Preset(preset)].items():
            merged.setdefault(key, value)
    return RunConfig(**merged)


# ------------------------------------------------------------------------------
# Helpers
# ------------------------------------------------------------------------------
def _load(path, config: RunConfig) -> TriangleMesh:
    return load_mesh(path, area_floor=config.area_floor)


def _save(mesh: TriangleMesh, config: RunConfig):
    mesh.check_area_floor()
    save_mesh(mesh, config.output, config.format)


def _mask(config: RunConfig, mesh: TriangleMesh) -> VertexMask:
    if config.mask is not None:
        return VertexMask.from_file(config.mask, mesh.n_vertices)
    box = config.mask_from_box
    return VertexMask.from_box(mesh, box[:3], box[3:])


def _solver_results(
    result: TriangleMesh,
    data: Optional[np.ndarray],
    reports: List[IterationReport],
    params: SolverParams,
) -> Results:
    if reports:
        lagrangian = reports[-1].lagrangian
    else:
        lagrangian = augmented_lagrangian(result, data, BregmanVariables.zeros(result), params)
    results: Results = {
        "outer": len(reports),
        "tv": tv_of_normal(result),
        "lagrangian": lagrangian,
        "min_area": result.min_area(),
    }
    if data is not None:
        results["objective"] = denoising_objective(result, data, params)
    return results


def _format_value(value: object) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _emit(results: Results):
    for key, value in results.items():
        print(f"{key}={_format_value(value)}")


# ------------------------------------------------------------------------------
# Commands
# ------------------------------------------------------------------------------
def _add_noise(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    noisy = add_normal_noise(mesh, config.noise_spec())
    _save(noisy, config)
    return {
        "sigma": config.sigma_factor * mean_edge_length(mesh),
        "vertex_l2_error": vertex_l2_error(noisy, mesh),
        "tv": tv_of_normal(noisy),
    }


def _denoise(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    data_mesh = mesh
    if config.data is not None:
        data_mesh = _load(config.data, config)
        if data_mesh.triangles.shape != mesh.triangles.shape or not np.array_equal(
            data_mesh.triangles, mesh.triangles
        ):
            raise ConnectivityMismatchError(f"{config.data} does not share the connectivity of {config.input}")
    params = config.solver_params()
    result, reports = split_bregman(mesh, data_mesh.vertices, params, listeners=listeners)
    _save(result, config)
    return _solver_results(result, data_mesh.vertices, reports, params)


def _inpaint(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    mask = _mask(config, mesh)
    params = config.solver_params()
    result, reports = inpaint(
        mesh,
        mask,
        params,
        init_step=config.min_surface_step,
        init_iters=config.min_surface_iters,
        skip_init=config.skip_min_surface,
        listeners=listeners,
    )
    _save(result, config)
    results = _solver_results(result, None, reports, params)
    results["free_vertices"] = len(mask)
    return results


def _min_surface(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    mask = _mask(config, mesh)
    result = minimal_surface_init(
        mesh, mask, config.min_surface_step, config.min_surface_iters, area_floor=config.area_floor
    )
    _save(result, config)
    return {
        "free_vertices": len(mask),
        "area_before": mesh.total_area(),
        "area_after": result.total_area(),
        "tv": tv_of_normal(result),
    }


def _tv(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    return {
        "tv": tv_of_normal(mesh),
        "tesa": tesa(mesh),
        "interior_edges": len(mesh.edge_frames),
        "mean_edge_length": mean_edge_length(mesh),
    }


def _metrics(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = _load(config.input, config)
    reference = _load(config.reference, config)
    return {
        "mean_angular_error": mean_angular_error(mesh, reference),
        "vertex_l2_error": vertex_l2_error(mesh, reference),
        "tv": tv_of_normal(mesh),
        "reference_tv": tv_of_normal(reference),
    }


SHAPE_BUILDERS: Dict[ShapeType, Callable[[RunConfig], TriangleMesh]] = {
    ShapeType.CUBE: lambda c: cube_mesh(c.resolution, c.size),
    ShapeType.CHOPPED_CUBE: lambda c: chopped_cube_mesh(),
    ShapeType.GRID: lambda c: flat_grid(c.resolution, c.size),
    ShapeType.DOME: lambda c: dome_patch(rings=c.resolution, height=0.5 * c.size),
    ShapeType.ICOSAHEDRON: lambda c: icosahedron(c.size),
}


def _generate(config: RunConfig, listeners: List[ReportListener]) -> Results:
    mesh = SHAPE_BUILDERS[config.shape](config)
    _save(mesh, config)
    return {
        "vertices": mesh.n_vertices,
        "triangles": mesh.n_triangles,
        "tv": tv_of_normal(mesh),
    }


def _runs(config: RunConfig, listeners: List[ReportListener]) -> Results:
    database = Database(config.db or database_url_from_env() or DEFAULT_DATABASE_URL)
    try:
        runs = list_runs(database, config.limit)
    finally:
        database.dispose()
    for run in runs:
        print(" ".join(f"{key}={_format_value(value)}" for key, value in run.items()))
    return {"count": len(runs)}


HANDLERS: Dict[Command, Handler] = {
    Command.ADD_NOISE: _add_noise,
    Command.DENOISE: _denoise,
    Command.INPAINT: _inpaint,
    Command.MIN_SURFACE: _min_surface,
    Command.TV: _tv,
    Command.METRICS: _metrics,
    Command.GENERATE: _generate,
    Command.RUNS: _runs,
}


# ------------------------------------------------------------------------------
# Entry points
# ------------------------------------------------------------------------------
def _make_recorder(config: RunConfig) -> Optional[RunRecorder]:
    if config.command == Command.RUNS:
        return None
    url = config.db or database_url_from_env()
    if url is None:
        return None
    return RunRecorder(
        Database(url),
        CommandType(config.command.value),
        config=config.provenance(),
        input_path=str(config.input) if config.input else None,
        output_path=str(config.output) if config.output else None,
    )


def run(config: RunConfig) -> int:
    """
    Execute one validated configuration.

    Returns:
        int: 0 on success, 1 if the command failed
    """
    handler = HANDLERS[config.command]
    recorder = _make_recorder(config)
    try:
        with contextlib.ExitStack() as stack:
            listeners: List[ReportListener] = []
            if config.telemetry is not None:
                listeners.append(stack.enter_context(CsvTelemetry(config.telemetry, config.provenance())))
            if recorder is not None:
                recorder.start()
                listeners.append(recorder)
            results = handler(config, listeners)
        if recorder is not None:
            recorder.finish(final_tv=results.get("tv"), final_lagrangian=results.get("lagrangian"))
    except (NormalTVError, ValidationError, OSError, SQLAlchemyError) as exc:
        logger.error("%s failed: %s", config.command.value, exc)
        if recorder is not None and not isinstance(exc, SQLAlchemyError):
            recorder.fail(str(exc))
        return 1
    finally:
        if recorder is not None:
            recorder.database.dispose()

    _emit(results)
    return 0


def configure_logging(level: str = "WARNING"):
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, build the configuration and run the command.

    Returns:
        int: Process exit status (2 for an invalid configuration)
    """
    namespace = build_parser().parse_args(argv)
    try:
        config = build_config(namespace)
    except (ValueError, OSError) as exc:
        configure_logging()
        logger.error("Invalid configuration: %s", exc)
        return 2

    configure_logging(config.log_level)
    return run(config)
