"""
Utility functions for diarclust.
"""

from .helpers import activity_runs, format_percent, make_rng, permutations, strictly_upper_ones
from .validators import (
    validate_binary,
    validate_cannot_link,
    validate_finite,
    validate_probability_row,
    validate_row_stochastic,
)

__all__ = [
    "activity_runs",
    "format_percent",
    "make_rng",
    "permutations",
    "strictly_upper_ones",
    "validate_binary",
    "validate_cannot_link",
    "validate_finite",
    "validate_probability_row",
    "validate_row_stochastic",
]
