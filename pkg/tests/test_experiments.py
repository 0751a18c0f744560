"""
Tests for the cube denoising and corner inpainting protocols.
"""

import numpy as np
import pytest

from core.energy import tv_of_normal
from core.experiments import corner_patch_mask, cube_corner_inpainting, cube_denoising
from core.schemas import NoiseSpec, SolverParams
from core.shapes import cube_mesh


def test_cube_denoising_halves_angular_error():
    outcome = cube_denoising()
    assert len(outcome.reports) == 200
    assert outcome.error_ratio <= 0.5
    assert tv_of_normal(outcome.result) < tv_of_normal(outcome.noisy)
    assert all(r.min_area > SolverParams().area_floor for r in outcome.reports)


def test_denoising_is_reproducible():
    params = SolverParams(outer_iters=20)
    first = cube_denoising(resolution=4, noise=NoiseSpec(sigma_factor=0.2, seed=9), params=params)
    second = cube_denoising(resolution=4, noise=NoiseSpec(sigma_factor=0.2, seed=9), params=params)
    np.testing.assert_array_equal(first.result.vertices, second.result.vertices)
    assert first.reports == second.reports


def test_corner_patch_mask():
    cube = cube_mesh(4)
    mask = corner_patch_mask(cube, upper=(1.25, 1.25, 1.25))
    corner = int(np.flatnonzero(np.all(cube.vertices == 1.0, axis=1))[0])
    assert corner in mask.free
    assert np.all(cube.vertices[mask.free_indices] >= 0.75)


def test_corner_inpainting_keeps_the_rest_of_the_cube():
    seen = []
    outcome = cube_corner_inpainting(
        resolution=4, params=SolverParams(outer_iters=10), init_iters=30, listeners=[seen.append]
    )
    fixed = outcome.mask.fixed_indices
    np.testing.assert_array_equal(outcome.result.vertices[fixed], outcome.truth.vertices[fixed])
    np.testing.assert_array_equal(outcome.initial.vertices[fixed], outcome.truth.vertices[fixed])
    np.testing.assert_array_equal(outcome.result.triangles, outcome.truth.triangles)
    assert seen == outcome.reports
    assert len(outcome.reports) == 10
    assert all(r.min_area > SolverParams().area_floor for r in outcome.reports)
    assert outcome.result_tv == pytest.approx(outcome.reports[-1].tv, abs=1e-12)


def test_corner_inpainting_recovers_the_corner():
    outcome = cube_corner_inpainting()
    assert len(outcome.reports) == 1000
    assert outcome.free_deviation <= 1e-2
    assert all(r.min_area > SolverParams().area_floor for r in outcome.reports)
