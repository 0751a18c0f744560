"""
Shared fixtures and mesh factories for the NormalTV test suite.
"""

from typing import List

import numpy as np
import pytest

from core.mesh import TriangleMesh
from core.shapes import chopped_cube_mesh, cube_mesh, dome_patch, flat_grid, icosahedron, jittered
from core.sphere import signed_normal_distance


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random proper rotation matrix."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def dihedral_angles_ok(mesh: TriangleMesh, margin: float = 1e-3) -> bool:
    """All interior dihedral angles satisfy margin < |alpha| < pi - margin."""
    alpha = np.abs(signed_normal_distance(mesh.edge_frames))
    return bool(np.all((alpha > margin) & (alpha < np.pi - margin)))


def random_meshes(count: int = 24) -> List[TriangleMesh]:
    """
    Randomized valid meshes with 8 to 50 vertices, closed and open, all
    dihedral angles away from 0 and pi.
    """
    bases = [
        (cube_mesh(1), 0.08),
        (icosahedron(), 0.05),
        (cube_mesh(2), 0.04),
        (flat_grid(4), 0.04),
        (dome_patch(rings=2, sectors=8), 0.03),
    ]
    meshes = []
    seed = 0
    while len(meshes) < count:
        base, amplitude = bases[seed % len(bases)]
        candidate = jittered(base, amplitude, seed=seed)
        seed += 1
        if 8 <= candidate.n_vertices <= 50 and dihedral_angles_ok(candidate):
            meshes.append(candidate)
    return meshes


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240607))


@pytest.fixture
def unit_cube():
    return cube_mesh(1)


@pytest.fixture
def cube3():
    return cube_mesh(3)


@pytest.fixture
def grid():
    return flat_grid(4)


@pytest.fixture
def chopped_cube():
    return chopped_cube_mesh()


@pytest.fixture
def dome():
    return dome_patch()


@pytest.fixture
def two_triangles():
    """Two triangles sharing the edge (0, 1) along the x axis, both normals +z."""
    vertices = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.5, -1.0, 0.0]]
    return TriangleMesh(vertices, [[0, 1, 2], [1, 0, 3]])


def hinge(alpha: float) -> TriangleMesh:
    """
    Two triangles hinged at the edge (0, 1); triangle 0 lies in z = 0 with
    normal +z, triangle 1 is bent down by alpha (convex for alpha > 0).
    """
    vertices = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.5, 1.0, 0.0],
        [0.5, -np.cos(alpha), -np.sin(alpha)],
    ]
    return TriangleMesh(vertices, [[0, 1, 2], [1, 0, 3]])
