"""
Pydantic schemas for diarclust.
"""

from .common import ArrayPayload, CommandResult, ErrorResult
from .corpus import CheckpointPayload, CorpusPayload, RecordingPayload
from .hyper import EncoderConfig, IgmmHyper, LossWeights, SynthConfig, TrainConfig
from .report import DerReport, EpochMetrics
from .run import RunConfig

__all__ = [
    "ArrayPayload", "CommandResult", "ErrorResult",
    "CheckpointPayload", "CorpusPayload", "RecordingPayload",
    "EncoderConfig", "IgmmHyper", "LossWeights", "SynthConfig", "TrainConfig",
    "DerReport", "EpochMetrics",
    "RunConfig",
]
