"""
Validation utilities for arrays and labelings.

Each validator returns an (is_valid, error_message) tuple; callers decide
which exception to raise.
"""

from typing import Optional, Sequence

import numpy as np


def validate_finite(values: np.ndarray, name: str = "array") -> tuple[bool, Optional[str]]:
    """
    Check that every entry is finite.

    Args:
        values: Array to check
        name: Label used in the error message

    Returns:
        tuple: (is_valid, error_message)
    """
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        return False, f"{name} contains NaN or Inf"
    return True, None


def validate_row_stochastic(
    matrix: np.ndarray, tol: float = 1e-9
) -> tuple[bool, Optional[str]]:
    """
    Check that a matrix is N x K with entries in [0, 1] and rows summing to 1.

    Args:
        matrix: Candidate responsibility matrix
        tol: Allowed deviation of each row sum from 1

    Returns:
        tuple: (is_valid, error_message)
    """
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        return False, f"expected a 2-D matrix, got {arr.ndim}-D"
    is_valid, error = validate_finite(arr, "responsibilities")
    if not is_valid:
        return False, error
    if np.any(arr < -tol) or np.any(arr > 1.0 + tol):
        return False, "entries must lie in [0, 1]"
    sums = arr.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if bad.size:
        return False, f"row {int(bad[0])} sums to {sums[bad[0]]!r}, not 1"
    return True, None


def validate_probability_row(row: np.ndarray, tol: float = 1e-9) -> tuple[bool, Optional[str]]:
    """Check a single probability vector."""
    arr = np.asarray(row, dtype=np.float64)
    if arr.ndim != 1:
        return False, "expected a 1-D probability vector"
    return validate_row_stochastic(arr[None, :], tol)


def validate_binary(values: np.ndarray, name: str = "labels") -> tuple[bool, Optional[str]]:
    """Check that an array only holds 0 and 1."""
    arr = np.asarray(values)
    if not np.all((arr == 0) | (arr == 1)):
        return False, f"{name} must be binary"
    return True, None


def validate_cannot_link(
    pairs: Sequence[tuple[int, int]], n: int
) -> tuple[bool, Optional[str]]:
    """Check that every cannot-link pair references two distinct valid indices."""
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            return False, f"cannot-link pair ({i}, {j}) out of range for {n} items"
        if i == j:
            return False, f"cannot-link pair ({i}, {j}) links an item to itself"
    return True, None
