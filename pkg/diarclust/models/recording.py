"""
Recordings, chunks and per-chunk network outputs.
"""

from dataclasses import dataclass, field
from typing import Any, List

import numpy as np

from diarclust.autodiff.ops import value_of


@dataclass
class Recording:
    """Frame features with ground-truth global speaker activity."""

    recording_id: str
    features: np.ndarray
    activities: np.ndarray
    speaker_ids: List[int]
    frame_period: float
    seed: int = 0

    @property
    def n_frames(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_speakers(self) -> int:
        return int(self.activities.shape[1])

    @property
    def duration(self) -> float:
        return self.n_frames * self.frame_period


@dataclass
class Chunk:
    """
    One fixed-length chunk.

    `speakers[s]` is the global speaker column behind label slot s, or -1
    when the slot has no speaker in this chunk.
    """

    index: int
    start_frame: int
    features: np.ndarray
    labels: np.ndarray
    speakers: List[int]
    dropped: int = 0

    @property
    def n_frames(self) -> int:
        return int(self.features.shape[0])


@dataclass
class ChunkOutput:
    """Estimated slot activities, slot embeddings and silent flags of a chunk."""

    index: int
    start_frame: int
    activities: Any
    embeddings: Any
    silent: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    @property
    def n_slots(self) -> int:
        return int(np.shape(value_of(self.activities))[1])

    def activity_values(self) -> np.ndarray:
        return np.asarray(value_of(self.activities), dtype=np.float64)
