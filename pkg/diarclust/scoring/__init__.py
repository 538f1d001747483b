"""
Scoring and baselines.
"""

from .ahc import constrained_ahc
from .der import aggregate_reports, score_der
from .rttm import rttm_read, rttm_read_all, rttm_write

__all__ = [
    "constrained_ahc",
    "aggregate_reports", "score_der",
    "rttm_read", "rttm_read_all", "rttm_write",
]
