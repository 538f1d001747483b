"""
JSON payloads for synthetic corpora and encoder checkpoints.
"""

from typing import Dict, List

from pydantic import BaseModel, Field, model_validator

from diarclust.schemas.common import ArrayPayload
from diarclust.schemas.hyper import EncoderConfig, SynthConfig

FORMAT_VERSION = 1


class RecordingPayload(BaseModel):
    """One synthetic recording."""

    recording_id: str
    seed: int = Field(..., ge=0)
    frame_period: float = Field(..., gt=0)
    features: ArrayPayload = Field(..., description="L x F frame features")
    activities: ArrayPayload = Field(..., description="L x S_Global binary activity")
    speaker_ids: List[int] = Field(..., description="Inventory index per global speaker")

    @model_validator(mode="after")
    def validate_shapes(self) -> "RecordingPayload":
        if len(self.features.shape) != 2 or len(self.activities.shape) != 2:
            raise ValueError("features and activities must be 2-D")
        if self.features.shape[0] != self.activities.shape[0]:
            raise ValueError("features and activities disagree on frame count")
        if self.activities.shape[1] != len(self.speaker_ids):
            raise ValueError("one speaker id is required per activity column")
        return self


class CorpusPayload(BaseModel):
    """A seeded synthetic corpus with its speaker inventory."""

    version: int = FORMAT_VERSION
    seed: int = Field(..., ge=0)
    config: SynthConfig
    inventory: ArrayPayload = Field(..., description="M x F unit identity vectors")
    recordings: List[RecordingPayload]


class CheckpointPayload(BaseModel):
    """Encoder and speaker classifier weights."""

    version: int = FORMAT_VERSION
    seed: int = Field(..., ge=0)
    encoder: EncoderConfig
    params: Dict[str, ArrayPayload]
