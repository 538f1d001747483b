"""
Central finite-difference oracle for checking tape gradients.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from diarclust.autodiff.ops import value_of
from diarclust.autodiff.tensor import Tape


def numerical_gradient(
    fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Args:
        fn: Function of one float64 array returning a scalar
        x: Point to differentiate at
        h: Step size

    Returns:
        np.ndarray: Gradient estimate with the shape of x
    """
    point = np.array(x, dtype=np.float64, copy=True)
    grad = np.zeros_like(point)
    for idx in np.ndindex(point.shape):
        orig = point[idx]
        point[idx] = orig + h
        upper = float(value_of(fn(point)))
        point[idx] = orig - h
        lower = float(value_of(fn(point)))
        point[idx] = orig
        grad[idx] = (upper - lower) / (2.0 * h)
    return grad


def tape_gradients(
    fn: Callable[..., object], inputs: Sequence[np.ndarray]
) -> Tuple[float, List[np.ndarray]]:
    """
    Record fn on a fresh tape and return its value with the input gradients.
    """
    tape = Tape()
    variables = [tape.variable(x) for x in inputs]
    out = fn(*variables)
    return float(out.value), tape.backward(out, variables)


def check_gradient(
    analytic: np.ndarray,
    numeric: np.ndarray,
    rtol: float = 1e-4,
    atol: float = 1e-7,
    small: float = 1e-3,
) -> Tuple[bool, Optional[str]]:
    """
    Compare gradients: relative tolerance, or absolute where |numeric| < small.

    Returns:
        tuple: (is_valid, error_message)
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        return False, f"shape mismatch {analytic.shape} vs {numeric.shape}"
    err = np.abs(analytic - numeric)
    scale = np.abs(numeric)
    ok = np.where(scale < small, err <= atol, err <= rtol * scale)
    if not np.all(ok):
        worst = int(np.argmax(np.where(ok, 0.0, err)))
        return False, (
            f"gradient mismatch at flat index {worst}: "
            f"analytic={analytic.ravel()[worst]!r} numeric={numeric.ravel()[worst]!r}"
        )
    return True, None
