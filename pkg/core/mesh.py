"""
Triangle mesh representation for NormalTV.

This module provides the immutable TriangleMesh, its derived edge topology
and the per-interior-edge geometric frames (normals, co-normals, lengths)
that every energy and solver routine is built on.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Optional, Tuple

import numpy as np

from core.errors import (
    ConnectivityMismatchError,
    DegenerateTriangleError,
    GeometryError,
    MeshError,
    NonManifoldError,
    OrientationError,
)

logger = logging.getLogger(__name__)

# Squared model units; triangles at or below this area have no usable normal.
AREA_FLOOR = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class MeshTopology:
    """
    Edge adjacency derived from triangle connectivity.

    Half-edge ``3 * f + k`` of triangle ``f`` runs from corner ``k`` to corner
    ``k + 1``. Edges are stored once as sorted vertex pairs in lexicographic
    order; that order is the canonical key order used everywhere else.

    Raises:
        NonManifoldError: If an edge borders more than two triangles.
        OrientationError: If two triangles traverse a shared edge in the
            same direction.
    """

    def __init__(self, triangles: np.ndarray):
        half_edges = np.stack([triangles, np.roll(triangles, -1, axis=1)], axis=-1).reshape(-1, 2)
        self.half_edges = _readonly(half_edges)

        if len(half_edges) == 0:
            empty_pairs = np.zeros((0, 2), dtype=np.int64)
            empty = np.zeros(0, dtype=np.int64)
            self.edges = _readonly(empty_pairs)
            self.edge_counts = _readonly(empty)
            self.interior_index = _readonly(empty.copy())
            self.face_plus = _readonly(empty.copy())
            self.face_minus = _readonly(empty.copy())
            self.plus_halfedges = _readonly(empty_pairs.copy())
            return

        canonical = np.sort(half_edges, axis=1)
        edges, inverse, counts = np.unique(canonical, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)

        crowded = np.flatnonzero(counts > 2)
        if crowded.size:
            edge = tuple(int(v) for v in edges[crowded[0]])
            raise NonManifoldError(f"Edge {edge} is shared by {counts[crowded[0]]} triangles")

        forward = (half_edges[:, 0] < half_edges[:, 1]).astype(np.float64)
        forward_count = np.bincount(inverse, weights=forward, minlength=len(edges))
        interior = counts == 2
        inconsistent = np.flatnonzero(interior & (forward_count != 1))
        if inconsistent.size:
            edge = tuple(int(v) for v in edges[inconsistent[0]])
            raise OrientationError(f"Triangles sharing edge {edge} traverse it in the same direction")

        # stable sort keeps the half-edge of the lower-indexed triangle first
        order = np.argsort(inverse, kind="stable")
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        interior_index = np.flatnonzero(interior)
        first = order[starts[interior_index]]
        second = order[starts[interior_index] + 1]

        self.edges = _readonly(edges.astype(np.int64))
        self.edge_counts = _readonly(counts)
        self.interior_index = _readonly(interior_index)
        self.face_plus = _readonly(first // 3)
        self.face_minus = _readonly(second // 3)
        self.plus_halfedges = _readonly(half_edges[first].copy())

    @property
    def interior_edges(self) -> np.ndarray:
        """Canonical (sorted) vertex pairs of the interior edges."""
        return self.edges[self.interior_index]

    @property
    def boundary_edges(self) -> np.ndarray:
        return self.edges[self.edge_counts == 1]

    def is_closed(self) -> bool:
        return bool(np.all(self.edge_counts == 2))


class TriangleMesh:
    """
    Immutable triangle mesh: vertex coordinates plus CCW triangle connectivity.

    Derived geometry (areas, normals, edge frames) is computed lazily and
    cached, which is safe because neither array can be mutated after
    construction.

    Args:
        vertices: (V, 3) coordinates in model units
        triangles: (F, 3) vertex indices, counter-clockwise seen from outside
        area_floor: Triangles with area at or below this value are rejected
        validate: Check index ranges and triangle areas
        topology: Reuse an already derived topology for the same triangles

    Raises:
        MeshError: If the arrays are malformed or reference missing vertices
        NonManifoldError, OrientationError: From the topology derivation
        DegenerateTriangleError: If a triangle is at or below the area floor
    """

    def __init__(
        self,
        vertices,
        triangles,
        area_floor: float = AREA_FLOOR,
        validate: bool = True,
        topology: Optional[MeshTopology] = None,
    ):
        vertices = np.array(vertices, dtype=np.float64)
        triangles = np.array(triangles, dtype=np.int64)
        if vertices.size == 0:
            vertices = vertices.reshape(0, 3)
        if triangles.size == 0:
            triangles = triangles.reshape(0, 3)
        if vertices.ndim != 2 or vertices.shape[1] != 3:
            raise MeshError(f"Vertices must have shape (V, 3), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise MeshError(f"Triangles must have shape (F, 3), got {triangles.shape}")

        self._vertices = _readonly(vertices)
        self._triangles = _readonly(triangles)
        self.area_floor = area_floor

        if validate:
            self._check_indices()
        self._topology = topology if topology is not None else MeshTopology(triangles)
        if validate:
            self.check_area_floor()

    def _check_indices(self):
        t = self._triangles
        if len(t) == 0:
            return
        if t.min() < 0 or t.max() >= len(self._vertices):
            raise MeshError(
                f"Triangle indices must lie in [0, {len(self._vertices) - 1}], "
                f"got range [{t.min()}, {t.max()}]"
            )
        repeated = np.flatnonzero((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 2] == t[:, 0]))
        if repeated.size:
            raise MeshError(f"Triangle {repeated[0]} repeats a vertex: {t[repeated[0]].tolist()}")

    def check_area_floor(self):
        """
        Raise if any triangle has area at or below the area floor.

        Raises:
            DegenerateTriangleError: Naming the smallest offending triangle
        """
        if self.n_triangles == 0:
            return
        areas = self.triangle_areas
        bad = ~(areas > self.area_floor)
        if np.any(bad):
            worst = int(np.flatnonzero(bad)[np.argmin(np.nan_to_num(areas[bad], nan=-1.0))])
            raise DegenerateTriangleError(
                f"Triangle {worst} has area {areas[worst]:.3e} <= floor {self.area_floor:.1e}",
                triangle=worst,
            )

    # ------------------------------------------------------------------
    # Basic accessors
    # ------------------------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @property
    def triangles(self) -> np.ndarray:
        return self._triangles

    @property
    def topology(self) -> MeshTopology:
        return self._topology

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_triangles(self) -> int:
        return len(self._triangles)

    @property
    def edges(self) -> np.ndarray:
        return self._topology.edges

    @property
    def n_edges(self) -> int:
        return len(self._topology.edges)

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    # ------------------------------------------------------------------
    # Derived geometry
    # ------------------------------------------------------------------
    @cached_property
    def face_cross(self) -> np.ndarray:
        """Unnormalised normals (x1 - x0) x (x2 - x0); length is twice the area."""
        x = self._vertices[self._triangles]
        return _readonly(np.cross(x[:, 1] - x[:, 0], x[:, 2] - x[:, 0]))

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        return _readonly(0.5 * np.linalg.norm(self.face_cross, axis=1))

    @cached_property
    def triangle_normals(self) -> np.ndarray:
        double_area = 2.0 * self.triangle_areas
        flat = np.flatnonzero(~(double_area > 0.0))
        if flat.size:
            raise DegenerateTriangleError(f"Triangle {flat[0]} has no normal (zero area)", triangle=int(flat[0]))
        return _readonly(self.face_cross / double_area[:, None])

    @cached_property
    def edge_frames(self) -> "EdgeFrames":
        return compute_edge_frames(self)

    def min_area(self) -> float:
        return float(self.triangle_areas.min()) if self.n_triangles else float("inf")

    def total_area(self) -> float:
        return float(self.triangle_areas.sum())

    def edge_lengths(self) -> np.ndarray:
        """Lengths of all edges (boundary and interior) in canonical order."""
        e = self.edges
        return np.linalg.norm(self._vertices[e[:, 1]] - self._vertices[e[:, 0]], axis=1)

    def vertex_normals(self) -> np.ndarray:
        """
        Area-weighted average of incident face normals, renormalised.

        Raises:
            GeometryError: If a vertex has no incident triangle
        """
        accumulated = np.zeros_like(self._vertices)
        for k in range(3):
            np.add.at(accumulated, self._triangles[:, k], self.face_cross)
        norms = np.linalg.norm(accumulated, axis=1)
        isolated = np.flatnonzero(~(norms > 0.0))
        if isolated.size:
            raise GeometryError(f"Vertex {isolated[0]} has no incident triangle; its normal is undefined")
        return accumulated / norms[:, None]

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self._topology.boundary_edges)

    # ------------------------------------------------------------------
    # Derived meshes
    # ------------------------------------------------------------------
    def with_vertices(self, vertices) -> "TriangleMesh":
        """
        Return a mesh with the same connectivity and new vertex positions.

        The topology is shared and the area floor is not re-checked; the
        solver decides what to do with degenerate iterates.
        """
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.shape != self._vertices.shape:
            raise ConnectivityMismatchError(
                f"Expected vertices of shape {self._vertices.shape}, got {vertices.shape}"
            )
        return TriangleMesh(
            vertices.copy(), self._triangles, area_floor=self.area_floor, validate=False, topology=self._topology
        )

    def flipped(self) -> "TriangleMesh":
        """Reverse the orientation of every triangle."""
        return TriangleMesh(self._vertices, self._triangles[:, ::-1], area_floor=self.area_floor)

    def __repr__(self):
        return f"<TriangleMesh(vertices={self.n_vertices}, triangles={self.n_triangles}, edges={self.n_edges})>"


@dataclass(frozen=True)
class EdgeFrame:
    """
    Geometry of one interior edge seen from its two incident triangles.

    Attributes:
        edge: (tail, head) as traversed by the '+' triangle
        face_plus: Index of the '+' triangle (the smaller index)
        face_minus: Index of the '-' triangle
        length: Euclidean edge length
        n_plus, n_minus: Unit face normals
        mu_plus, mu_minus: Unit co-normals, in-plane, perpendicular to the
            edge and pointing away from their triangle
    """
    edge: Tuple[int, int]
    face_plus: int
    face_minus: int
    length: float
    n_plus: np.ndarray
    n_minus: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray

    def swapped(self) -> "EdgeFrame":
        """The same edge with the roles of the two triangles exchanged."""
        return EdgeFrame(
            edge=(self.edge[1], self.edge[0]),
            face_plus=self.face_minus,
            face_minus=self.face_plus,
            length=self.length,
            n_plus=self.n_minus,
            n_minus=self.n_plus,
            mu_plus=self.mu_minus,
            mu_minus=self.mu_plus,
        )


@dataclass(frozen=True)
class EdgeFrames:
    """
    Struct-of-arrays batch of edge frames, aligned with the interior edges of
    the mesh topology (canonical order). Attribute names match EdgeFrame so
    the sphere geometry functions accept either.
    """
    edges: np.ndarray
    halfedges: np.ndarray
    face_plus: np.ndarray
    face_minus: np.ndarray
    length: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray

    def __len__(self) -> int:
        return len(self.length)

    def __getitem__(self, i: int) -> EdgeFrame:
        return EdgeFrame(
            edge=(int(self.halfedges[i, 0]), int(self.halfedges[i, 1])),
            face_plus=int(self.face_plus[i]),
            face_minus=int(self.face_minus[i]),
            length=float(self.length[i]),
            n_plus=self.n_plus[i],
            n_minus=self.n_minus[i],
            mu_plus=self.mu_plus[i],
            mu_minus=self.mu_minus[i],
        )

    def __iter__(self) -> Iterator[EdgeFrame]:
        return (self[i] for i in range(len(self)))


def compute_edge_frames(mesh: TriangleMesh) -> EdgeFrames:
    """
    Compute the frames of every interior edge in one vectorised pass.

    The co-normal of a triangle at an edge is (edge direction as the triangle
    traverses it) x (triangle normal); for CCW triangles this points away
    from the triangle interior.

    Raises:
        DegenerateTriangleError: If an incident triangle has zero area
    """
    topology = mesh.topology
    x = mesh.vertices
    tail = topology.plus_halfedges[:, 0]
    head = topology.plus_halfedges[:, 1]

    edge_vectors = x[head] - x[tail]
    lengths = np.linalg.norm(edge_vectors, axis=1)
    direction = edge_vectors / lengths[:, None] if len(lengths) else edge_vectors

    normals = mesh.triangle_normals
    n_plus = normals[topology.face_plus]
    n_minus = normals[topology.face_minus]
    # the '-' triangle traverses the edge head -> tail
    mu_plus = np.cross(direction, n_plus)
    mu_minus = np.cross(-direction, n_minus)

    return EdgeFrames(
        edges=topology.interior_edges,
        halfedges=topology.plus_halfedges,
        face_plus=topology.face_plus,
        face_minus=topology.face_minus,
        length=_readonly(lengths),
        n_plus=_readonly(n_plus),
        n_minus=_readonly(n_minus),
        mu_plus=_readonly(mu_plus),
        mu_minus=_readonly(mu_minus),
    )


def build_edge_frames(mesh: TriangleMesh) -> List[EdgeFrame]:
    """
    One EdgeFrame per interior edge; boundary edges are excluded.

    The '+' side is the incident triangle with the smaller index.
    """
    return list(mesh.edge_frames)


def mean_edge_length(mesh: TriangleMesh) -> float:
    """
    Arithmetic mean length over all edges, boundary edges included.

    Raises:
        MeshError: If the mesh has no edges
    """
    if mesh.n_edges == 0:
        raise MeshError("Cannot compute the mean edge length of an empty mesh")
    return float(mesh.edge_lengths().mean())
