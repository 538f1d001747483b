"""
Helper functions shared across modules.
"""

import itertools
from typing import List, Tuple

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """
    Build the repository-wide generator: numpy PCG64 seeded with `seed`.

    Args:
        seed: Non-negative integer seed

    Returns:
        np.random.Generator: Platform-stable generator
    """
    return np.random.Generator(np.random.PCG64(seed))


def strictly_upper_ones(k: int) -> np.ndarray:
    """K x K matrix U with U[i, j] = 1 iff j > i, so (U @ v)[i] = sum_{j>i} v[j]."""
    return np.triu(np.ones((k, k), dtype=np.float64), k=1)


def permutations(n: int) -> List[Tuple[int, ...]]:
    """All permutations of range(n) in lexicographic order (identity first)."""
    return list(itertools.permutations(range(n)))


def activity_runs(active: np.ndarray) -> List[Tuple[int, int]]:
    """
    Maximal runs of True in a boolean frame vector.

    Returns:
        list: (start_frame, end_frame_exclusive) pairs in order
    """
    flags = np.concatenate(([False], np.asarray(active, dtype=bool), [False]))
    edges = np.flatnonzero(np.diff(flags.astype(np.int8)))
    return [(int(s), int(e)) for s, e in zip(edges[0::2], edges[1::2])]


def format_percent(fraction: float) -> str:
    """Format a fraction as a percentage with two decimals."""
    return f"{100.0 * fraction:.2f}%"
