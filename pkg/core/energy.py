"""
Energies of NormalTV.

This module evaluates the total variation of the normal, the denoising
objective and the augmented Lagrangians of the denoising and inpainting
problems, and assembles their exact gradients with respect to the vertex
positions by the analytic chain rule.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np

from core.errors import ConnectivityMismatchError, DegenerateTriangleError, VariableKeyError
from core.mask import VertexMask
from core.mesh import TriangleMesh
from core.schemas import SolverParams
from core.sphere import geodesic_distance, signed_normal_distance

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class BregmanVariables:
    """
    Auxiliary variable d_E and scaled multiplier b_E of every interior edge.

    Arrays are aligned with ``edges``, the canonical (sorted) vertex pairs of
    the interior edges of the mesh they belong to.
    """
    edges: np.ndarray
    d: np.ndarray
    b: np.ndarray

    @classmethod
    def zeros(cls, mesh: TriangleMesh) -> "BregmanVariables":
        m = len(mesh.topology.interior_index)
        return cls(edges=mesh.topology.interior_edges, d=np.zeros(m), b=np.zeros(m))

    @classmethod
    def from_dict(cls, mesh: TriangleMesh, d: Dict[Edge, float], b: Dict[Edge, float]) -> "BregmanVariables":
        """
        Build variables from edge-keyed maps (keys in either vertex order).

        Raises:
            VariableKeyError: If a map is not keyed exactly by the interior edges
        """
        edges = mesh.topology.interior_edges
        keys = [(int(i), int(j)) for i, j in edges]
        arrays = []
        for name, values in (("d", d), ("b", b)):
            canonical = {tuple(sorted(key)): value for key, value in values.items()}
            if set(canonical) != set(keys):
                raise VariableKeyError(f"{name} must be keyed by the {len(keys)} interior edges of the mesh")
            arrays.append(np.array([canonical[key] for key in keys], dtype=np.float64))
        return cls(edges=edges, d=arrays[0], b=arrays[1])

    def as_dict(self) -> Tuple[Dict[Edge, float], Dict[Edge, float]]:
        keys = [(int(i), int(j)) for i, j in self.edges]
        return dict(zip(keys, self.d.tolist())), dict(zip(keys, self.b.tolist()))

    def with_values(self, d: Optional[np.ndarray] = None, b: Optional[np.ndarray] = None) -> "BregmanVariables":
        return replace(self, d=self.d if d is None else d, b=self.b if b is None else b)

    def check_keys(self, mesh: TriangleMesh):
        """
        Raises:
            VariableKeyError: If the variables belong to other connectivity
        """
        edges = mesh.topology.interior_edges
        if self.edges is edges:
            return
        if self.edges.shape != edges.shape or not np.array_equal(self.edges, edges):
            raise VariableKeyError("Bregman variables are not keyed by the interior edges of this mesh")

    def rekeyed(self, mesh: TriangleMesh) -> "BregmanVariables":
        """Carry values over to a mesh with new connectivity; new edges start at 0."""
        target = mesh.topology.interior_edges
        known = {(int(i), int(j)): k for k, (i, j) in enumerate(self.edges)}
        d = np.zeros(len(target))
        b = np.zeros(len(target))
        for k, (i, j) in enumerate(target):
            source = known.get((int(i), int(j)))
            if source is not None:
                d[k] = self.d[source]
                b[k] = self.b[source]
        return BregmanVariables(edges=target, d=d, b=b)


def _check_data(mesh: TriangleMesh, data: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if data is None:
        return None
    data = np.asarray(data, dtype=np.float64)
    if data.shape != mesh.vertices.shape:
        raise ConnectivityMismatchError(
            f"Data vertices have shape {data.shape}, mesh vertices {mesh.vertices.shape}"
        )
    return data


def signed_distances(mesh: TriangleMesh) -> np.ndarray:
    """Signed normal distance s_E of every interior edge, canonical order."""
    return signed_normal_distance(mesh.edge_frames)


def tv_of_normal(mesh: TriangleMesh) -> float:
    """Sum over interior edges of the geodesic distance of the two normals times the edge length."""
    frames = mesh.edge_frames
    return float(np.sum(geodesic_distance(frames.n_plus, frames.n_minus) * frames.length))


def tesa(mesh: TriangleMesh) -> float:
    """
    Total absolute edge-lengthed supplementary angle: sum of exterior
    dihedral angles times edge length, each angle taken as pi minus the
    interior dihedral angle between the two triangles.
    """
    frames = mesh.edge_frames
    interior = geodesic_distance(-frames.mu_plus, -frames.mu_minus)
    return float(np.sum((np.pi - interior) * frames.length))


def denoising_objective(mesh: TriangleMesh, data: np.ndarray, params: SolverParams) -> float:
    """Fidelity 1/2 sum |x_V - x_V^data|^2 plus beta times the TV of the normal."""
    data = _check_data(mesh, data)
    fidelity = 0.5 * float(np.sum((mesh.vertices - data) ** 2))
    return fidelity + params.beta * tv_of_normal(mesh)


def augmented_lagrangian(
    mesh: TriangleMesh,
    data: Optional[np.ndarray],
    variables: BregmanVariables,
    params: SolverParams,
) -> float:
    """
    Augmented Lagrangian of the denoising problem, or of the inpainting
    problem when ``data`` is None (no fidelity term).

    Raises:
        ConnectivityMismatchError: If data is not aligned with the vertices
        VariableKeyError: If the variables belong to other connectivity
    """
    data = _check_data(mesh, data)
    variables.check_keys(mesh)
    frames = mesh.edge_frames
    residual = variables.d - signed_normal_distance(frames) - variables.b

    value = params.beta * float(np.sum(np.abs(variables.d) * frames.length))
    value += 0.5 * params.lambda_ * float(np.sum(residual ** 2 * frames.length))
    if data is not None:
        value += 0.5 * float(np.sum((mesh.vertices - data) ** 2))
    return value


def normal_pullback(mesh: TriangleMesh, covectors: np.ndarray) -> np.ndarray:
    """
    Pull per-face covectors on the unit normals back to the vertices.

    For covectors m_f tangent to n_f, returns the gradient of
    sum_f m_f . n_f(x), i.e. (e_i x m_f) / |N_f| at corner i of face f with
    e_i = x_{i+1} - x_{i+2}.
    """
    x = mesh.vertices[mesh.triangles]
    scale = 1.0 / (2.0 * mesh.triangle_areas)
    gradient = np.zeros_like(mesh.vertices)
    for i in range(3):
        opposite = x[:, (i + 1) % 3] - x[:, (i + 2) % 3]
        np.add.at(gradient, mesh.triangles[:, i], np.cross(opposite, covectors) * scale[:, None])
    return gradient


def _check_areas(mesh: TriangleMesh, area_floor: float):
    areas = mesh.triangle_areas
    bad = np.flatnonzero(~(areas > area_floor))
    if bad.size:
        raise DegenerateTriangleError(
            f"Triangle {bad[0]} has area {areas[bad[0]]:.3e} <= floor {area_floor:.1e}; gradient undefined",
            triangle=int(bad[0]),
        )


def lagrangian_gradient(
    mesh: TriangleMesh,
    data: Optional[np.ndarray],
    variables: BregmanVariables,
    params: SolverParams,
    mask: Optional[VertexMask] = None,
) -> np.ndarray:
    """
    Exact gradient of the augmented Lagrangian with respect to the vertex
    positions.

    Includes the fidelity term, the dependence of both edge-weighted sums on
    the edge lengths, and the signed distances through dn/dx, using
    ds/dn+ = -mu+ and ds/dn- = -mu-.

    Args:
        mesh: Current iterate
        data: Data vertices, or None for inpainting
        variables: Current d and b
        params: beta, lambda and the area floor
        mask: Free vertices; fixed rows of the result are zero

    Returns:
        np.ndarray: (V, 3) gradient

    Raises:
        DegenerateTriangleError: If a triangle is at or below the area floor
    """
    data = _check_data(mesh, data)
    variables.check_keys(mesh)
    _check_areas(mesh, params.area_floor)

    frames = mesh.edge_frames
    x = mesh.vertices
    residual = variables.d - signed_normal_distance(frames) - variables.b

    gradient = np.zeros_like(x) if data is None else x - data

    # d|E| / dx at both endpoints
    length_weight = params.beta * np.abs(variables.d) + 0.5 * params.lambda_ * residual ** 2
    tail = frames.halfedges[:, 0]
    head = frames.halfedges[:, 1]
    direction = (x[head] - x[tail]) / frames.length[:, None]
    np.add.at(gradient, head, length_weight[:, None] * direction)
    np.add.at(gradient, tail, -length_weight[:, None] * direction)

    # -ds = mu+ . dn+ + mu- . dn-
    weight = params.lambda_ * residual * frames.length
    covectors = np.zeros((mesh.n_triangles, 3))
    np.add.at(covectors, frames.face_plus, weight[:, None] * frames.mu_plus)
    np.add.at(covectors, frames.face_minus, weight[:, None] * frames.mu_minus)
    gradient += normal_pullback(mesh, covectors)

    if mask is not None:
        mask.check(mesh)
        gradient = mask.restrict(gradient)
    return gradient


def total_area(mesh: TriangleMesh) -> float:
    return mesh.total_area()


def area_gradient(mesh: TriangleMesh, mask: Optional[VertexMask] = None) -> np.ndarray:
    """Gradient of the total triangle area: (e_i x n_f) / 2 at corner i of face f."""
    x = mesh.vertices[mesh.triangles]
    normals = mesh.triangle_normals
    gradient = np.zeros_like(mesh.vertices)
    for i in range(3):
        opposite = x[:, (i + 1) % 3] - x[:, (i + 2) % 3]
        np.add.at(gradient, mesh.triangles[:, i], 0.5 * np.cross(opposite, normals))
    if mask is not None:
        mask.check(mesh)
        gradient = mask.restrict(gradient)
    return gradient
