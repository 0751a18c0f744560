"""
Synthetic noise for denoising experiments.

Each vertex is displaced along its area-weighted vertex normal by a Gaussian
amount with standard deviation sigma_factor times the mean edge length.
Samples come from numpy's PCG64 generator, drawn once per vertex in vertex
order, so the output is a pure function of the mesh and the NoiseSpec.
"""

import logging

import numpy as np

from core.mesh import TriangleMesh, mean_edge_length
from core.schemas import NoiseSpec

logger = logging.getLogger(__name__)


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def add_normal_noise(mesh: TriangleMesh, spec: NoiseSpec) -> TriangleMesh:
    """
    Displace every vertex by g * n_V with g ~ N(0, (sigma_factor * mean edge length)^2).

    Returns:
        TriangleMesh: Noisy mesh with the same connectivity

    Raises:
        GeometryError: If a vertex has no incident triangle
        DegenerateTriangleError: If the noise collapses a triangle
    """
    normals = mesh.vertex_normals()
    if spec.sigma_factor == 0.0:
        return mesh

    sigma = spec.sigma_factor * mean_edge_length(mesh)
    offsets = make_generator(spec.seed).normal(0.0, sigma, size=mesh.n_vertices)
    noisy = mesh.with_vertices(mesh.vertices + offsets[:, None] * normals)
    noisy.check_area_floor()
    logger.info("Added normal noise: sigma=%.6g (factor %.3g), seed=%d", sigma, spec.sigma_factor, spec.seed)
    return noisy
