"""
Split recordings into fixed-length chunks with local speaker slots.
"""

import logging
from typing import List

import numpy as np

from diarclust.models.recording import Chunk, Recording

logger = logging.getLogger(__name__)


def chunk_recording(rec: Recording, chunk_frames: int, s_local: int) -> List[Chunk]:
    """
    Consecutive, non-overlapping chunks of `chunk_frames` frames.

    Speakers active in a chunk take slots in order of first activity (ties to
    the lower column); beyond `s_local` the later starters are dropped. A
    trailing partial chunk is discarded.

    Args:
        rec: Recording with L x S_Global activities
        chunk_frames: Frames per chunk T
        s_local: Slots per chunk

    Returns:
        List[Chunk]: Chunks with T x s_local labels
    """
    if chunk_frames < 1:
        raise ValueError("chunk_frames must be at least 1")
    if s_local < 1:
        raise ValueError("s_local must be at least 1")

    chunks = []
    dropped_total = 0
    for index in range(rec.n_frames // chunk_frames):
        start = index * chunk_frames
        window = np.asarray(rec.activities[start:start + chunk_frames]) > 0

        active = np.flatnonzero(window.any(axis=0))
        first = window[:, active].argmax(axis=0)
        ordered = [int(active[j]) for j in np.lexsort((active, first))]
        kept, dropped = ordered[:s_local], ordered[s_local:]
        if dropped:
            dropped_total += len(dropped)
            logger.warning(
                f"{rec.recording_id} chunk {index}: {len(ordered)} active speakers, "
                f"dropping columns {dropped}"
            )

        labels = np.zeros((chunk_frames, s_local), dtype=np.float64)
        speakers = [-1] * s_local
        for slot, column in enumerate(kept):
            labels[:, slot] = window[:, column]
            speakers[slot] = column

        chunks.append(Chunk(
            index=index,
            start_frame=start,
            features=np.asarray(rec.features[start:start + chunk_frames], dtype=np.float64),
            labels=labels,
            speakers=speakers,
            dropped=len(dropped),
        ))

    if dropped_total:
        logger.warning(f"{rec.recording_id}: dropped {dropped_total} chunk speakers in total")
    return chunks
