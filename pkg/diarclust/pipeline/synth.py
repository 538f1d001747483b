"""
Seeded synthetic recordings with turn-taking speakers and controlled overlap.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from diarclust.models.recording import Recording
from diarclust.schemas.hyper import SynthConfig
from diarclust.utils.helpers import make_rng

logger = logging.getLogger(__name__)


@dataclass
class SpeakerInventory:
    """Unit identity vectors shared by every recording of a corpus."""

    vectors: np.ndarray

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    @classmethod
    def draw(cls, size: int, feature_dim: int, rng: np.random.Generator) -> "SpeakerInventory":
        return cls(_unit_rows(rng.standard_normal((size, feature_dim))))


@dataclass
class SyntheticCorpus:
    config: SynthConfig
    seed: int
    inventory: SpeakerInventory
    recordings: List[Recording] = field(default_factory=list)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    return matrix / np.linalg.norm(matrix, axis=1, keepdims=True)


def _turns(n_speakers: int, frames: int, config: SynthConfig, rng) -> List[Tuple[int, int, int]]:
    """(speaker, start, end) turns tiling [0, frames), consecutive speakers differ."""
    turns = []
    start, speaker = 0, int(rng.integers(n_speakers))
    while start < frames:
        length = int(rng.integers(config.min_turn, config.max_turn + 1))
        end = min(start + length, frames)
        turns.append((speaker, start, end))
        start = end
        speaker = (speaker + int(rng.integers(1, n_speakers))) % n_speakers
    return turns


def _overlap_extensions(turns, target: int, rng) -> np.ndarray:
    """Frames each turn runs on into the next one; sums to `target` when capacity allows."""
    extensions = np.zeros(len(turns), dtype=np.int64)
    capacity = np.array(
        [turns[j + 1][2] - turns[j + 1][1] - 1 for j in range(len(turns) - 1)] + [0],
        dtype=np.int64,
    )
    remaining = min(target, int(capacity.sum()))
    if remaining < target:
        logger.warning(f"Turns too short for {target} overlapped frames; using {remaining}")
    while remaining > 0:
        open_turns = np.flatnonzero(extensions < capacity)
        for j in rng.permutation(open_turns):
            if remaining == 0:
                break
            extensions[j] += 1
            remaining -= 1
    return extensions


def synth_activity(n_speakers: int, config: SynthConfig, rng) -> np.ndarray:
    """
    L x S binary turn-taking activity.

    Each turn is extended into the following one so that round(overlap * L)
    frames carry two speakers. A single speaker is active throughout.
    """
    frames = config.frames
    activity = np.zeros((frames, n_speakers), dtype=np.int8)
    if n_speakers == 1:
        activity[:, 0] = 1
        return activity

    turns = _turns(n_speakers, frames, config, rng)
    extensions = _overlap_extensions(turns, int(round(config.overlap * frames)), rng)
    for (speaker, start, end), extra in zip(turns, extensions):
        activity[start:min(end + int(extra), frames), speaker] = 1
    return activity


def synth_recording(
    config: SynthConfig,
    seed: int,
    inventory: Optional[SpeakerInventory] = None,
    recording_id: str = "rec0",
) -> Recording:
    """
    Generate one recording.

    Frame features are the sum of the active speakers' identity vectors plus
    isotropic Gaussian noise.

    Args:
        config: Speaker counts, length, overlap and noise
        seed: Generator seed
        inventory: Shared identities; fresh identities are drawn when omitted
        recording_id: Identifier stored on the recording

    Returns:
        Recording: Features, activities and inventory speaker ids
    """
    rng = make_rng(seed)
    low, high = config.speaker_range
    n_speakers = int(rng.integers(low, high + 1))

    if inventory is None:
        vectors = _unit_rows(rng.standard_normal((n_speakers, config.feature_dim)))
        speaker_ids = list(range(n_speakers))
    else:
        if inventory.size < n_speakers:
            raise ValueError(f"inventory of {inventory.size} cannot supply {n_speakers} speakers")
        if inventory.vectors.shape[1] != config.feature_dim:
            raise ValueError("inventory feature dimension does not match the config")
        speaker_ids = sorted(int(i) for i in rng.choice(inventory.size, size=n_speakers, replace=False))
        vectors = inventory.vectors[speaker_ids]

    activity = synth_activity(n_speakers, config, rng)
    noise = config.noise * rng.standard_normal((config.frames, config.feature_dim))
    features = activity.astype(np.float64) @ vectors + noise
    return Recording(
        recording_id=recording_id,
        features=features,
        activities=activity,
        speaker_ids=speaker_ids,
        frame_period=config.frame_period,
        seed=seed,
    )


def synth_corpus(config: SynthConfig, n_recordings: int, seed: int) -> SyntheticCorpus:
    """Draw an inventory and `n_recordings` recordings that share it."""
    if n_recordings < 1:
        raise ValueError("n_recordings must be at least 1")
    rng = make_rng(seed)
    inventory = SpeakerInventory.draw(config.inventory_size, config.feature_dim, rng)
    child_seeds = rng.integers(0, 2**31 - 1, size=n_recordings)
    recordings = [
        synth_recording(config, int(child), inventory, recording_id=f"rec{idx:03d}")
        for idx, child in enumerate(child_seeds)
    ]
    logger.info(f"Synthesized {n_recordings} recordings from seed {seed}")
    return SyntheticCorpus(config=config, seed=seed, inventory=inventory, recordings=recordings)
