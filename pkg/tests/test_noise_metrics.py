"""
Tests for the normal-direction noise and the reconstruction metrics.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import ConnectivityMismatchError, GeometryError
from core.mesh import TriangleMesh, mean_edge_length
from core.metrics import box_surface_distance, max_box_deviation, mean_angular_error, vertex_l2_error
from core.noise import add_normal_noise
from core.schemas import NoiseSpec
from core.shapes import cube_mesh, flat_grid, jittered


class TestNoise:
    def test_same_seed_is_bit_identical(self, cube3):
        spec = NoiseSpec(sigma_factor=0.3, seed=7)
        np.testing.assert_array_equal(add_normal_noise(cube3, spec).vertices, add_normal_noise(cube3, spec).vertices)

    def test_different_seeds_differ(self, cube3):
        first = add_normal_noise(cube3, NoiseSpec(sigma_factor=0.3, seed=1))
        second = add_normal_noise(cube3, NoiseSpec(sigma_factor=0.3, seed=2))
        assert not np.array_equal(first.vertices, second.vertices)

    def test_zero_sigma_leaves_mesh_unchanged(self, cube3):
        noisy = add_normal_noise(cube3, NoiseSpec(sigma_factor=0.0, seed=3))
        np.testing.assert_array_equal(noisy.vertices, cube3.vertices)

    def test_connectivity_is_preserved(self, cube3):
        noisy = add_normal_noise(cube3, NoiseSpec(sigma_factor=0.3, seed=3))
        np.testing.assert_array_equal(noisy.triangles, cube3.triangles)

    def test_displacement_is_along_vertex_normals(self, grid):
        noisy = add_normal_noise(grid, NoiseSpec(sigma_factor=0.2, seed=5))
        np.testing.assert_array_equal(noisy.vertices[:, :2], grid.vertices[:, :2])
        assert np.any(noisy.vertices[:, 2])

    def test_statistics(self):
        cube = cube_mesh(30)
        spec = NoiseSpec(sigma_factor=0.3, seed=42)
        noisy = add_normal_noise(cube, spec)
        offsets = np.einsum("ij,ij->i", noisy.vertices - cube.vertices, cube.vertex_normals())
        sigma = 0.3 * mean_edge_length(cube)
        assert cube.n_vertices == 5402
        assert np.std(offsets) == pytest.approx(sigma, rel=0.05)
        assert abs(np.mean(offsets)) < 4.0 * sigma / np.sqrt(cube.n_vertices)

    def test_isolated_vertex(self):
        mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [3, 3, 3]], [[0, 1, 2]])
        with pytest.raises(GeometryError):
            add_normal_noise(mesh, NoiseSpec())

    @pytest.mark.parametrize("kwargs", [{"sigma_factor": -0.1}, {"seed": -1}, {"sigma_factor": float("inf")}])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ValidationError):
            NoiseSpec(**kwargs)


class TestMetrics:
    def test_angular_error_of_identical_meshes(self, cube3):
        assert mean_angular_error(cube3, cube3) == 0.0

    def test_angular_error_is_symmetric(self, cube3):
        rough = jittered(cube3, 0.03, seed=8)
        assert mean_angular_error(rough, cube3) == mean_angular_error(cube3, rough)
        assert mean_angular_error(rough, cube3) > 0.0

    def test_angular_error_needs_same_connectivity(self, cube3, unit_cube):
        with pytest.raises(ConnectivityMismatchError):
            mean_angular_error(cube3, unit_cube)

    def test_reversed_triangles_are_a_different_connectivity(self, grid):
        flipped = TriangleMesh(grid.vertices, grid.triangles[:, ::-1])
        with pytest.raises(ConnectivityMismatchError):
            mean_angular_error(flipped, grid)

    def test_vertex_l2_error(self, grid):
        shifted = grid.with_vertices(grid.vertices + [0.0, 0.0, 0.5])
        assert vertex_l2_error(shifted, grid) == pytest.approx(0.5, abs=1e-15)
        with pytest.raises(ConnectivityMismatchError):
            vertex_l2_error(flat_grid(2), grid)

    def test_box_surface_distance(self):
        points = np.array([[0.5, 0.5, 1.0], [0.5, 0.5, 0.9], [0.5, 0.5, 1.2], [2.0, 2.0, 0.5]])
        np.testing.assert_allclose(box_surface_distance(points, (0, 0, 0), (1, 1, 1)), [0.0, 0.1, 0.2, np.sqrt(2.0)])

    def test_cube_lies_on_its_box(self, cube3):
        assert max_box_deviation(cube3) == 0.0
        assert max_box_deviation(cube3, indices=np.array([], dtype=int)) == 0.0
