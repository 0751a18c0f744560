"""
Procedural test meshes.

Cubes, grids and domes with exactly known geometry, used by the tests, the
``generate`` command and the demo pipeline.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.mesh import TriangleMesh


def _orient_outward(vertices: np.ndarray, triangles: np.ndarray, center: Sequence[float]) -> np.ndarray:
    """Flip triangles whose normal points towards ``center`` (convex shapes only)."""
    x = vertices[triangles]
    normals = np.cross(x[:, 1] - x[:, 0], x[:, 2] - x[:, 0])
    outward = x.mean(axis=1) - np.asarray(center, dtype=np.float64)
    inward = np.einsum("ij,ij->i", normals, outward) < 0
    oriented = triangles.copy()
    oriented[inward] = oriented[inward][:, ::-1]
    return oriented


def cube_mesh(resolution: int = 10, size: float = 1.0, alternate_diagonals: bool = False) -> TriangleMesh:
    """
    Closed triangulated cube [0, size]^3 with ``resolution`` x ``resolution``
    quads per side, each split into two triangles.

    Lattice vertices are shared between sides, so the mesh is closed with
    6 * resolution^2 + 2 vertices.

    Args:
        resolution: Quads along each cube edge
        size: Edge length of the cube
        alternate_diagonals: Split quads along alternating diagonals
    """
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    n = resolution
    index: Dict[Tuple[int, int, int], int] = {}
    vertices: List[List[float]] = []
    triangles: List[Tuple[int, int, int]] = []

    def vertex_id(key: Tuple[int, int, int]) -> int:
        if key not in index:
            index[key] = len(vertices)
            vertices.append([size * c / n for c in key])
        return index[key]

    for axis in range(3):
        u_axis, v_axis = [a for a in range(3) if a != axis]
        for side in (0, n):
            for i in range(n):
                for j in range(n):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        key = [0, 0, 0]
                        key[axis] = side
                        key[u_axis] = i + di
                        key[v_axis] = j + dj
                        corners.append(vertex_id(tuple(key)))
                    a, b, c, d = corners
                    if alternate_diagonals and (i + j) % 2:
                        triangles.extend([(a, b, d), (b, c, d)])
                    else:
                        triangles.extend([(a, b, c), (a, c, d)])

    vertices_array = np.array(vertices, dtype=np.float64)
    center = (0.5 * size,) * 3
    return TriangleMesh(vertices_array, _orient_outward(vertices_array, np.array(triangles), center))


def chopped_cube_mesh() -> TriangleMesh:
    """Unit cube with the corner (1, 1, 1) cut off by the plane x + y + z = 2."""
    vertices = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
        ]
    )
    triangles = np.array(
        [
            [0, 2, 6], [0, 6, 3],  # x = 0
            [0, 1, 5], [0, 5, 3],  # y = 0
            [0, 1, 4], [0, 4, 2],  # z = 0
            [1, 4, 5],             # x = 1
            [2, 4, 6],             # y = 1
            [3, 5, 6],             # z = 1
            [4, 5, 6],             # cut
        ]
    )
    return TriangleMesh(vertices, _orient_outward(vertices, triangles, (0.4, 0.4, 0.4)))


def flat_grid(resolution: int = 4, size: float = 1.0) -> TriangleMesh:
    """Open planar grid in z = 0 over [0, size]^2, normals along +z."""
    n = resolution
    ticks = np.linspace(0.0, size, n + 1)
    xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
    vertices = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(xs.size)])

    triangles = []
    for i in range(n):
        for j in range(n):
            a = i * (n + 1) + j
            b = (i + 1) * (n + 1) + j
            c = b + 1
            d = a + 1
            triangles.extend([(a, b, c), (a, c, d)])
    return TriangleMesh(vertices, triangles)


def dome_patch(rings: int = 5, sectors: int = 16, height: float = 0.5) -> TriangleMesh:
    """
    Spherical cap over the unit disk: z = height * sqrt(1 - r^2).

    Vertex 0 is the apex; the last ``sectors`` vertices form the circular
    boundary in the plane z = 0. Triangles are counter-clockwise seen from +z.
    """
    vertices = [[0.0, 0.0, height]]
    for k in range(1, rings + 1):
        r = k / rings
        z = height * np.sqrt(max(0.0, 1.0 - r * r))
        for j in range(sectors):
            theta = 2.0 * np.pi * j / sectors
            vertices.append([r * np.cos(theta), r * np.sin(theta), z])

    def ring(k: int, j: int) -> int:
        return 1 + (k - 1) * sectors + j % sectors

    triangles = [(0, ring(1, j), ring(1, j + 1)) for j in range(sectors)]
    for k in range(1, rings):
        for j in range(sectors):
            a, b, c, d = ring(k, j), ring(k + 1, j), ring(k + 1, j + 1), ring(k, j + 1)
            triangles.extend([(a, b, c), (a, c, d)])
    return TriangleMesh(np.array(vertices), triangles)


def icosahedron(radius: float = 1.0) -> TriangleMesh:
    """Regular icosahedron centred at the origin."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    vertices *= radius / np.linalg.norm(vertices[0])
    triangles = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    return TriangleMesh(vertices, _orient_outward(vertices, triangles, (0.0, 0.0, 0.0)))


def jittered(mesh: TriangleMesh, amplitude: float, seed: int = 0) -> TriangleMesh:
    """Displace every vertex by a uniform random offset in [-amplitude, amplitude]^3."""
    rng = np.random.Generator(np.random.PCG64(seed))
    offsets = rng.uniform(-amplitude, amplitude, size=mesh.vertices.shape)
    return TriangleMesh(mesh.vertices + offsets, mesh.triangles, area_floor=mesh.area_floor)

