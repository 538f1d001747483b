"""
Domain entities.
"""

from .embedding import EmbeddingSet, GenerativeSample, VariationalParams
from .encoder import EncoderParams
from .recording import Chunk, ChunkOutput, Recording
from .timeline import DiarTimeline

__all__ = [
    "EmbeddingSet", "GenerativeSample", "VariationalParams",
    "EncoderParams",
    "Chunk", "ChunkOutput", "Recording",
    "DiarTimeline",
]
