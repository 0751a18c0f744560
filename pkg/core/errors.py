"""
Exception hierarchy for NormalTV.

Mesh problems are ValueErrors so callers that only care about bad input can
catch the builtin type; solver failures are RuntimeErrors.
"""

from typing import Optional


class NormalTVError(Exception):
    """Base class for every error raised by NormalTV."""


class MeshError(NormalTVError, ValueError):
    """A mesh violates one of the TriangleMesh invariants."""


class MeshFormatError(MeshError):
    """A mesh file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class NonManifoldError(MeshError):
    """An edge borders more than two triangles."""


class OrientationError(MeshError):
    """Two triangles traverse a shared edge in the same direction."""


class DegenerateTriangleError(MeshError):
    """A triangle has area at or below the configured floor."""

    def __init__(self, message: str, triangle: Optional[int] = None):
        super().__init__(message)
        self.triangle = triangle


class MeshWriteError(MeshError):
    """A mesh cannot be written (non-finite coordinates)."""


class ConnectivityMismatchError(MeshError):
    """Two meshes or arrays that must be aligned are not."""


class GeometryError(NormalTVError, ValueError):
    """A geometric quantity is undefined for the given input."""


class AntipodalError(GeometryError):
    """The logarithmic map is undefined between antipodal points."""


class FoldedGeometryError(GeometryError):
    """Two neighbouring triangles are folded back onto each other."""


class VariableKeyError(NormalTVError, KeyError):
    """Bregman variables are not keyed by the interior edges of the mesh."""


class SolverError(NormalTVError, RuntimeError):
    """The split Bregman iteration cannot continue."""

    def __init__(self, message: str, triangle: Optional[int] = None):
        super().__init__(message)
        self.triangle = triangle
