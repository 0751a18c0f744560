"""
Reconstruction quality metrics against a ground-truth mesh.
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import ConnectivityMismatchError
from core.mesh import TriangleMesh
from core.sphere import geodesic_distance


def mean_angular_error(mesh: TriangleMesh, reference: TriangleMesh) -> float:
    """
    Mean over triangles of the angle between corresponding face normals, in radians.

    Raises:
        ConnectivityMismatchError: If the triangles differ
    """
    if mesh.triangles.shape != reference.triangles.shape or not np.array_equal(mesh.triangles, reference.triangles):
        raise ConnectivityMismatchError("Angular error needs meshes with identical connectivity")
    return float(np.mean(geodesic_distance(mesh.triangle_normals, reference.triangle_normals)))


def vertex_l2_error(mesh: TriangleMesh, reference: TriangleMesh) -> float:
    """
    Root mean square vertex displacement.

    Raises:
        ConnectivityMismatchError: If the vertex counts differ
    """
    if mesh.n_vertices != reference.n_vertices:
        raise ConnectivityMismatchError(
            f"Vertex counts differ: {mesh.n_vertices} vs {reference.n_vertices}"
        )
    return float(np.sqrt(np.sum((mesh.vertices - reference.vertices) ** 2) / mesh.n_vertices))


def box_surface_distance(points: np.ndarray, lower: Sequence[float], upper: Sequence[float]) -> np.ndarray:
    """Distance of each point to the surface of the axis-aligned box [lower, upper]."""
    points = np.asarray(points, dtype=np.float64)
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    outside = np.linalg.norm(np.maximum(np.maximum(lower - points, points - upper), 0.0), axis=-1)
    inside = np.min(np.minimum(points - lower, upper - points), axis=-1)
    return np.where(outside > 0.0, outside, np.maximum(inside, 0.0))


def max_box_deviation(
    mesh: TriangleMesh,
    lower: Sequence[float] = (0.0, 0.0, 0.0),
    upper: Sequence[float] = (1.0, 1.0, 1.0),
    indices: Optional[np.ndarray] = None,
) -> float:
    """Largest distance of the (selected) vertices to the surface of a box, e.g. the unit cube."""
    points = mesh.vertices if indices is None else mesh.vertices[indices]
    if len(points) == 0:
        return 0.0
    return float(np.max(box_surface_distance(points, lower, upper)))
