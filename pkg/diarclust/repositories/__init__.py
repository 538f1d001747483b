"""
File-backed repositories.
"""

from .checkpoint_repository import CheckpointRepository
from .corpus_repository import CorpusRepository, reference_timeline
from .embedding_repository import EmbeddingRepository
from .metrics_repository import MetricsRepository
from .rttm_repository import RttmRepository

__all__ = [
    "CheckpointRepository",
    "CorpusRepository",
    "reference_timeline",
    "EmbeddingRepository",
    "MetricsRepository",
    "RttmRepository",
]
