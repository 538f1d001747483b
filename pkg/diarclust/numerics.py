"""
Special functions and stable primitives used by inference and its gradients.

Everything here works in float64 and accepts either a Python scalar or a
numpy array; scalars come back as floats, arrays as arrays.
"""

from typing import Union

import numpy as np
from scipy.special import logsumexp

from diarclust.exceptions import NumericsDomainError

ArrayOrFloat = Union[float, np.ndarray]

# Recurrence pushes arguments up to this point before the asymptotic series.
_ASYMPTOTIC_FROM = 6.0


def _as_positive_array(x: ArrayOrFloat, name: str) -> np.ndarray:
    arr = np.array(x, dtype=np.float64, copy=True)
    if not np.all(np.isfinite(arr)):
        raise NumericsDomainError(f"{name} requires finite arguments")
    if np.any(arr <= 0.0):
        raise NumericsDomainError(f"{name} requires positive arguments")
    return arr


def _restore_kind(x: ArrayOrFloat, out: np.ndarray) -> ArrayOrFloat:
    if np.ndim(x) == 0 and not isinstance(x, np.ndarray):
        return float(out)
    return out


def digamma(x: ArrayOrFloat) -> ArrayOrFloat:
    """
    Digamma function Psi(x) for x > 0.

    Shifts small arguments up with Psi(x) = Psi(x + 1) - 1/x, then applies
    the asymptotic expansion in 1/x^2.

    Args:
        x: Positive scalar or array

    Returns:
        Psi(x), same kind as the input

    Raises:
        NumericsDomainError: If any argument is non-finite or <= 0
    """
    arr = _as_positive_array(x, "digamma")
    shift = np.zeros_like(arr)
    small = arr < _ASYMPTOTIC_FROM
    while np.any(small):
        shift[small] -= 1.0 / arr[small]
        arr[small] += 1.0
        small = arr < _ASYMPTOTIC_FROM

    inv = 1.0 / arr
    inv2 = inv * inv
    series = inv2 * (
        1.0 / 12.0
        - inv2 * (
            1.0 / 120.0
            - inv2 * (
                1.0 / 252.0
                - inv2 * (
                    1.0 / 240.0
                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))
                )
            )
        )
    )
    out = shift + np.log(arr) - 0.5 * inv - series
    return _restore_kind(x, out)


def trigamma(x: ArrayOrFloat) -> ArrayOrFloat:
    """
    Trigamma function Psi'(x) for x > 0, the derivative of digamma.

    Args:
        x: Positive scalar or array

    Returns:
        Psi'(x), same kind as the input

    Raises:
        NumericsDomainError: If any argument is non-finite or <= 0
    """
    arr = _as_positive_array(x, "trigamma")
    shift = np.zeros_like(arr)
    small = arr < _ASYMPTOTIC_FROM
    while np.any(small):
        shift[small] += 1.0 / (arr[small] * arr[small])
        arr[small] += 1.0
        small = arr < _ASYMPTOTIC_FROM

    inv = 1.0 / arr
    inv2 = inv * inv
    series = inv * (
        1.0
        + inv * 0.5
        + inv2 * (
            1.0 / 6.0
            - inv2 * (
                1.0 / 30.0
                - inv2 * (
                    1.0 / 42.0
                    - inv2 * (
                        1.0 / 30.0
                        - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0 - inv2 * 7.0 / 6.0))
                    )
                )
            )
        )
    )
    return _restore_kind(x, shift + series)


def log_normalize(logits: np.ndarray) -> np.ndarray:
    """Subtract logsumexp along the last axis (row-wise log-softmax)."""
    arr = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise NumericsDomainError("log_normalize requires finite logits")
    return arr - logsumexp(arr, axis=-1, keepdims=True)


def normalize_log_probs(logits: np.ndarray) -> np.ndarray:
    """
    Turn unnormalized log probabilities into a probability row (or rows).

    Args:
        logits: Sequence of K finite reals, or an N x K matrix

    Returns:
        np.ndarray: exp(logit - logsumexp(logits)) along the last axis
    """
    return np.exp(log_normalize(logits))
