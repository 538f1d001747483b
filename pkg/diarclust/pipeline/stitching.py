"""
Cross-chunk gathering of slot embeddings and stitching of clustered slots
into a global timeline.
"""

from typing import Callable, List, Optional, Sequence

import numpy as np

from diarclust.autodiff import ops as F
from diarclust.autodiff.ops import is_recorded, value_of
from diarclust.exceptions import IndexMapError
from diarclust.igmm import hard_assign
from diarclust.models.embedding import EmbeddingSet
from diarclust.models.recording import ChunkOutput
from diarclust.models.timeline import DiarTimeline


def gather_embeddings(
    outputs: Sequence[ChunkOutput],
    keep: Optional[Callable[[int, int], bool]] = None,
) -> EmbeddingSet:
    """
    Stack non-silent slot embeddings chunk by chunk, slots in order.

    Args:
        outputs: Encoded chunks
        keep: Optional extra filter on (chunk position, slot)

    Returns:
        EmbeddingSet: Rows indexed by (chunk index, slot)
    """
    rows, index = [], []
    dim = 0
    for position, out in enumerate(outputs):
        dim = np.shape(value_of(out.embeddings))[1]
        for slot in range(out.n_slots):
            if out.silent[slot] or (keep is not None and not keep(position, slot)):
                continue
            rows.append(F.getitem(out.embeddings, slot))
            index.append((out.index, slot))

    if not rows:
        return EmbeddingSet(np.zeros((0, dim)), [])
    if any(is_recorded(row) for row in rows):
        return EmbeddingSet(F.stack(rows), index)
    return EmbeddingSet(np.stack(rows), index)


def stitch(
    outputs: Sequence[ChunkOutput],
    assignments,
    index: Sequence[tuple],
    frame_period: float,
    binarize_threshold: float = 0.5,
    n_frames: Optional[int] = None,
) -> DiarTimeline:
    """
    Global timeline from clustered chunk slots.

    Each retained slot goes to the argmax cluster of its responsibility row
    (or to the given hard label); a cluster is active on a frame when any of
    its slots has activity >= binarize_threshold there.

    Args:
        outputs: Encoded chunks
        assignments: N x K responsibilities or N hard labels
        index: (chunk index, slot) per row, as from gather_embeddings
        frame_period: Seconds per frame
        binarize_threshold: Activity cut-off
        n_frames: Timeline length in frames (defaults to the chunk span)

    Returns:
        DiarTimeline: Speakers named spk<cluster>

    Raises:
        IndexMapError: If rows and index entries disagree or reference unknown slots
    """
    values = np.asarray(value_of(assignments))
    labels = hard_assign(values) if values.ndim == 2 else values.astype(np.int64)
    if labels.shape[0] != len(index):
        raise IndexMapError(f"{labels.shape[0]} assignment rows for {len(index)} retained slots")

    by_chunk = {out.index: out for out in outputs}
    span = max((out.start_frame + out.activity_values().shape[0] for out in outputs), default=0)
    if n_frames is None:
        n_frames = span
    n_clusters = int(values.shape[1]) if values.ndim == 2 else int(labels.max(initial=-1)) + 1

    grid = np.zeros((n_frames, max(n_clusters, 0)), dtype=bool)
    for row, (chunk_index, slot) in enumerate(index):
        out = by_chunk.get(chunk_index)
        if out is None or not 0 <= slot < out.n_slots:
            raise IndexMapError(f"no chunk slot ({chunk_index}, {slot}) to stitch")
        if out.silent[slot]:
            raise IndexMapError(f"silent slot ({chunk_index}, {slot}) has a responsibility row")
        active = out.activity_values()[:, slot] >= binarize_threshold
        lo = out.start_frame
        hi = min(lo + active.shape[0], n_frames)
        grid[lo:hi, labels[row]] |= active[: hi - lo]

    return DiarTimeline.from_frames(grid, frame_period, [f"spk{k}" for k in range(grid.shape[1])])


def slot_speakers(speakers: List[int], perm: Sequence[int]) -> List[int]:
    """Global speaker column behind each output slot under a PIT permutation (-1 if none)."""
    return [speakers[perm[slot]] for slot in range(len(perm))]
