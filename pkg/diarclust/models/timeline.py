"""
Segment-list diarization timeline.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from diarclust.utils.helpers import activity_runs

Segment = Tuple[float, float]


@dataclass
class DiarTimeline:
    """Per-speaker sorted, non-overlapping (start, end) segments in seconds."""

    segments: Dict[str, List[Segment]] = field(default_factory=dict)

    def validate(self) -> tuple[bool, Optional[str]]:
        """
        Check start < end and per-speaker sorted, non-overlapping segments.

        Returns:
            tuple: (is_valid, error_message)
        """
        for speaker, segs in self.segments.items():
            prev_end = -np.inf
            for start, end in segs:
                if not (np.isfinite(start) and np.isfinite(end)) or start < 0:
                    return False, f"speaker {speaker}: invalid segment ({start}, {end})"
                if not start < end:
                    return False, f"speaker {speaker}: segment start {start} not before end {end}"
                if start < prev_end:
                    return False, f"speaker {speaker}: segments overlap or are unsorted at {start}"
                prev_end = end
        return True, None

    @property
    def speakers(self) -> List[str]:
        return sorted(self.segments)

    def end_time(self) -> float:
        ends = [end for segs in self.segments.values() for _, end in segs]
        return max(ends) if ends else 0.0

    def total_speech(self) -> float:
        return float(sum(end - start for segs in self.segments.values() for start, end in segs))

    @classmethod
    def from_frames(
        cls,
        activity: np.ndarray,
        frame_period: float,
        labels: Optional[Sequence[str]] = None,
    ) -> "DiarTimeline":
        """
        Convert an L x K boolean frame matrix to segments.

        Args:
            activity: Frame activity, one column per speaker
            frame_period: Seconds per frame
            labels: Speaker names per column (defaults to spk0, spk1, ...)

        Returns:
            DiarTimeline: Speakers without active frames are omitted
        """
        active = np.asarray(activity, dtype=bool)
        if labels is None:
            labels = [f"spk{k}" for k in range(active.shape[1])]
        segments: Dict[str, List[Segment]] = {}
        for k, label in enumerate(labels):
            runs = activity_runs(active[:, k])
            if runs:
                segments[str(label)] = [
                    (round(s * frame_period, 6), round(e * frame_period, 6)) for s, e in runs
                ]
        return cls(segments)

    def to_frames(
        self, step: float, n_frames: Optional[int] = None
    ) -> Tuple[np.ndarray, List[str]]:
        """
        Rasterize to an n_frames x K boolean matrix at `step` seconds per frame.

        Returns:
            tuple: (activity matrix, speaker labels in column order)
        """
        labels = self.speakers
        if n_frames is None:
            n_frames = int(round(self.end_time() / step))
        grid = np.zeros((n_frames, len(labels)), dtype=bool)
        for k, label in enumerate(labels):
            for start, end in self.segments[label]:
                lo = max(int(round(start / step)), 0)
                hi = min(int(round(end / step)), n_frames)
                if hi > lo:
                    grid[lo:hi, k] = True
        return grid, labels
