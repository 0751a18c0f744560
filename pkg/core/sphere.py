"""
Geometry of the unit sphere S^2 for NormalTV.

Face normals live on S^2. This module provides the logarithmic and
exponential maps, the geodesic distance, the signed normal distance of an
edge frame and the closed-form derivatives used by the gradient assembly.
Every function broadcasts over leading axes, so it accepts a single
EdgeFrame as well as a batched EdgeFrames.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from core.errors import AntipodalError, FoldedGeometryError, GeometryError
from core.mesh import EdgeFrame, EdgeFrames

logger = logging.getLogger(__name__)

Frame = Union[EdgeFrame, EdgeFrames]

# |a x b| below this (with a . b < 0) counts as antipodal / folded
PARALLEL_TOL = 1e-12


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def _norm(a: np.ndarray) -> np.ndarray:
    return np.sqrt(_dot(a, a))


@dataclass(frozen=True)
class TangentVector:
    """
    A vector in the tangent plane of S^2 at ``base``.

    Raises:
        GeometryError: If base is not unit length or dir is not tangent
    """
    base: np.ndarray
    dir: np.ndarray

    def __post_init__(self):
        if abs(float(_norm(self.base)) - 1.0) > 1e-12:
            raise GeometryError(f"Tangent base {self.base} is not a unit vector")
        if abs(float(_dot(self.base, self.dir))) > 1e-10:
            raise GeometryError("Tangent direction is not orthogonal to its base point")

    @property
    def length(self) -> float:
        return float(_norm(self.dir))


def geodesic_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Great-circle distance between unit vectors, in [0, pi].

    Evaluated as atan2(|a x b|, a . b), which is arccos(a . b) with the dot
    product clamped to [-1, 1] but keeps full precision near 0 and pi.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.arctan2(_norm(np.cross(a, b)), _dot(a, b))


def sphere_log(base: np.ndarray, target: np.ndarray) -> TangentVector:
    """
    Logarithmic map of S^2: the tangent vector at ``base`` pointing to
    ``target`` whose length is their geodesic distance.

    Args:
        base: Unit foot point
        target: Unit vector, not antipodal to base

    Returns:
        TangentVector: Zero exactly when base equals target

    Raises:
        AntipodalError: If target = -base (direction undefined)
    """
    base = np.asarray(base, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if np.array_equal(base, target):
        return TangentVector(base=base, dir=np.zeros(3))

    sine = float(_norm(np.cross(base, target)))
    cosine = float(_dot(base, target))
    if sine <= PARALLEL_TOL and cosine < 0.0:
        raise AntipodalError(f"Logarithmic map undefined between antipodal points {base} and {target}")
    if sine == 0.0:
        return TangentVector(base=base, dir=np.zeros(3))

    tangent = target - cosine * base
    tangent = tangent - _dot(tangent, base) * base
    distance = np.arctan2(sine, cosine)
    return TangentVector(base=base, dir=distance * tangent / _norm(tangent))


def sphere_exp(base: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Exponential map of S^2: follow the great circle from base along direction."""
    base = np.asarray(base, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    length = float(_norm(direction))
    if length == 0.0:
        return base.copy()
    return np.cos(length) * base + np.sin(length) * direction / length


def _check_unfolded(frame: Frame):
    cross = _norm(np.cross(frame.n_plus, frame.n_minus))
    folded = (cross <= PARALLEL_TOL) & (_dot(frame.n_plus, frame.n_minus) < 0.0)
    if np.any(folded):
        edge = frame.edge if isinstance(frame, EdgeFrame) else tuple(frame.edges[np.flatnonzero(folded)[0]])
        raise FoldedGeometryError(f"Triangles at edge {edge} are folded back onto each other (angle pi)")


def signed_normal_distance(frame: Frame) -> np.ndarray:
    """
    Signed dihedral angle sign(mu+ . n-) * arccos(n+ . n-) of an edge.

    Positive at convex creases, negative at concave ones, exactly 0 for
    coplanar triangles.

    Raises:
        FoldedGeometryError: If n+ = -n-
    """
    _check_unfolded(frame)
    return np.sign(_dot(frame.mu_plus, frame.n_minus)) * geodesic_distance(frame.n_plus, frame.n_minus)


def d_arccos_dn(base: np.ndarray, other: np.ndarray) -> np.ndarray:
    """
    Derivative of arccos(base . other) with respect to base on S^2:
    -(other - (base . other) base) / sqrt(1 - (base . other)^2), a unit
    tangent vector at base.

    Raises:
        GeometryError: If base = +-other (the quotient is singular)
    """
    base = np.asarray(base, dtype=np.float64)
    other = np.asarray(other, dtype=np.float64)
    sine = _norm(np.cross(base, other))
    if np.any(sine <= PARALLEL_TOL):
        raise GeometryError("Derivative of arccos is singular for parallel vectors")
    cosine = _dot(base, other)
    return -(other - cosine[..., None] * base) / sine[..., None]


def d_signed_distance(frame: Frame) -> Tuple[np.ndarray, np.ndarray]:
    """
    Derivatives of the signed normal distance with respect to n+ and n-.

    These are -mu+ and -mu-, continuous across n+ = n-.

    Raises:
        FoldedGeometryError: If n+ = -n-
    """
    _check_unfolded(frame)
    return -np.asarray(frame.mu_plus), -np.asarray(frame.mu_minus)
