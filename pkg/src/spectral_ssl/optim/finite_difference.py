"""Central finite differences for checking analytic gradients."""

from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..validators import validate_positive

# Step used by the gradient checks, in double precision
DEFAULT_STEP = 1e-5


def central_difference(
    f: Callable[[NDArray[np.float64]], float],
    x: ArrayLike,
    h: float = DEFAULT_STEP,
) -> NDArray[np.float64]:
    """Numerical gradient (f(x + h·e_i) − f(x − h·e_i)) / 2h, entry by entry.

    Args:
        f: Scalar function of an array
        x: Point of evaluation, any shape
        h: Step size

    Returns:
        Array of the same shape as x
    """
    h = validate_positive(h, "h")
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        f_plus = f(x)
        flat[i] = original - h
        f_minus = f(x)
        flat[i] = original
        out[i] = 0.5 * (f_plus - f_minus) / h
    return grad


def gradient_check(
    f: Callable[[NDArray[np.float64]], float],
    grad: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    x: ArrayLike,
    h: float = DEFAULT_STEP,
) -> float:
    """Relative error ||g − g_fd|| / max(||g||, ||g_fd||) at x.

    Returns 0 when both gradients vanish.
    """
    x = np.array(x, dtype=float)
    analytic = np.asarray(grad(x.copy()), dtype=float)
    numeric = central_difference(f, x, h)
    scale = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(numeric)))
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(analytic - numeric)) / scale
