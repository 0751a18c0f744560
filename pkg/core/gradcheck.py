"""
Finite-difference gradients for checking the analytic ones.
"""

import logging
from typing import Callable, Optional

import numpy as np

from core.mask import VertexMask

logger = logging.getLogger(__name__)


def central_difference_gradient(
    func: Callable[[np.ndarray], float],
    x0: np.ndarray,
    h: float = 1e-6,
    mask: Optional[VertexMask] = None,
) -> np.ndarray:
    """
    Centered-difference approximation of the gradient of ``func`` at ``x0``.

    Args:
        func: Scalar function of a (V, 3) vertex array
        x0: Point of evaluation
        h: Step size
        mask: Only differentiate with respect to the free vertices

    Returns:
        np.ndarray: Array shaped like x0; rows of fixed vertices are zero
    """
    x0 = np.asarray(x0, dtype=np.float64)
    rows = range(len(x0)) if mask is None else mask.free_indices
    logger.debug("Finite differences over %d coordinates with h=%g", 3 * len(rows), h)

    gradient = np.zeros_like(x0)
    for row in rows:
        for col in range(x0.shape[1]):
            x = x0.copy()
            x[row, col] = x0[row, col] + h
            f_plus = func(x)
            x[row, col] = x0[row, col] - h
            f_minus = func(x)
            gradient[row, col] = (f_plus - f_minus) / (2.0 * h)
    return gradient


def relative_gradient_error(analytic: np.ndarray, approximate: np.ndarray) -> float:
    """||analytic - approximate|| / ||approximate||, or the absolute error if that norm is 0."""
    scale = float(np.linalg.norm(approximate))
    error = float(np.linalg.norm(analytic - approximate))
    return error / scale if scale > 0 else error
