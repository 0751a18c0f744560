"""
Free-vertex masks.

A VertexMask names the vertices the solver may move. Denoising frees every
vertex; inpainting frees only the patch interior and keeps the rest fixed.
"""

from typing import Iterable, Sequence

import numpy as np

from core.errors import ConnectivityMismatchError, MeshError
from core.mesh import TriangleMesh
from core.mesh_io import PathLike, read_mask, write_mask


class VertexMask:
    """
    Set of free (optimisable) vertex indices of a mesh with ``n_vertices``
    vertices; the complement is fixed.

    Raises:
        MeshError: If an index is out of range
    """

    def __init__(self, free: Iterable[int], n_vertices: int):
        indices = np.unique(np.asarray(list(free), dtype=np.int64))
        if indices.size and (indices[0] < 0 or indices[-1] >= n_vertices):
            raise MeshError(f"Mask indices must lie in [0, {n_vertices - 1}]")
        indices.flags.writeable = False
        self.n_vertices = n_vertices
        self.free = frozenset(int(i) for i in indices)
        self._indices = indices

    @classmethod
    def all(cls, n_vertices: int) -> "VertexMask":
        return cls(range(n_vertices), n_vertices)

    @classmethod
    def from_file(cls, path: PathLike, n_vertices: int) -> "VertexMask":
        return cls(read_mask(path, n_vertices), n_vertices)

    @classmethod
    def from_box(cls, mesh: TriangleMesh, lower: Sequence[float], upper: Sequence[float]) -> "VertexMask":
        """Free every vertex inside the closed axis-aligned box [lower, upper]."""
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        inside = np.all((mesh.vertices >= lower) & (mesh.vertices <= upper), axis=1)
        return cls(np.flatnonzero(inside), mesh.n_vertices)

    @property
    def free_indices(self) -> np.ndarray:
        return self._indices

    @property
    def fixed_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.as_bool())

    def as_bool(self) -> np.ndarray:
        flags = np.zeros(self.n_vertices, dtype=bool)
        flags[self._indices] = True
        return flags

    def check(self, mesh: TriangleMesh):
        if mesh.n_vertices != self.n_vertices:
            raise ConnectivityMismatchError(
                f"Mask is for {self.n_vertices} vertices but the mesh has {mesh.n_vertices}"
            )

    def restrict(self, field: np.ndarray) -> np.ndarray:
        """Copy of a per-vertex field with the rows of fixed vertices zeroed."""
        restricted = np.zeros_like(field)
        restricted[self._indices] = field[self._indices]
        return restricted

    def to_file(self, path: PathLike) -> None:
        write_mask(self._indices, path)

    def __len__(self) -> int:
        return len(self.free)

    def __repr__(self):
        return f"<VertexMask(free={len(self.free)}/{self.n_vertices})>"
