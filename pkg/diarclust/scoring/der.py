"""
Diarization error rate with collar, overlap included.
"""

import logging
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from diarclust.models.timeline import DiarTimeline
from diarclust.schemas.report import DerReport

logger = logging.getLogger(__name__)

FRAME_STEP = 0.01


def _collar_mask(ref: DiarTimeline, n_frames: int, collar: float, step: float) -> np.ndarray:
    scored = np.ones(n_frames, dtype=bool)
    if collar <= 0:
        return scored
    for segs in ref.segments.values():
        for boundary in (b for seg in segs for b in seg):
            lo = max(int(round((boundary - collar) / step)), 0)
            hi = min(int(round((boundary + collar) / step)), n_frames)
            scored[lo:hi] = False
    return scored


def _validated(timeline: DiarTimeline, name: str) -> DiarTimeline:
    is_valid, error = timeline.validate()
    if not is_valid:
        raise ValueError(f"malformed {name} timeline: {error}")
    return timeline


def score_der(
    ref: DiarTimeline,
    hyp: DiarTimeline,
    collar: float = 0.25,
    step: float = FRAME_STEP,
) -> DerReport:
    """
    Score a hypothesis timeline against a reference.

    Frames within +-collar of any reference boundary are not scored. Speakers
    are mapped one-to-one by maximum overlap (Hungarian). On each scored frame
    missed = max(0, Nref - Nhyp), false alarm = max(0, Nhyp - Nref) and
    confusion = min(Nref, Nhyp) - correctly mapped speakers; all three are
    divided by the scored reference speech.

    Args:
        ref: Reference timeline
        hyp: Hypothesis timeline
        collar: Seconds excluded on each side of reference boundaries
        step: Internal frame resolution in seconds

    Returns:
        DerReport: der = missed + false_alarm + confusion
    """
    if collar < 0:
        raise ValueError("collar must be non-negative")
    _validated(ref, "reference")
    _validated(hyp, "hypothesis")

    n_frames = int(round(max(ref.end_time(), hyp.end_time()) / step))
    ref_grid, _ = ref.to_frames(step, n_frames)
    hyp_grid, _ = hyp.to_frames(step, n_frames)
    scored = _collar_mask(ref, n_frames, collar, step)
    ref_grid, hyp_grid = ref_grid[scored], hyp_grid[scored]

    n_ref = ref_grid.sum(axis=1)
    n_hyp = hyp_grid.sum(axis=1)
    total = float(n_ref.sum())
    if total == 0.0:
        logger.warning("Reference has no scored speech; reporting zero error")
        return DerReport(der=0.0, missed=0.0, false_alarm=0.0, confusion=0.0, scored_speech=0.0)

    correct = np.zeros_like(n_ref)
    if ref_grid.shape[1] and hyp_grid.shape[1]:
        overlap = ref_grid.T.astype(np.int64) @ hyp_grid.astype(np.int64)
        rows, cols = linear_sum_assignment(overlap, maximize=True)
        for r, h in zip(rows, cols):
            correct += ref_grid[:, r] & hyp_grid[:, h]

    missed = float(np.maximum(n_ref - n_hyp, 0).sum()) / total
    false_alarm = float(np.maximum(n_hyp - n_ref, 0).sum()) / total
    confusion = float((np.minimum(n_ref, n_hyp) - correct).sum()) / total
    return DerReport(
        der=missed + false_alarm + confusion,
        missed=missed,
        false_alarm=false_alarm,
        confusion=confusion,
        scored_speech=total * step,
    )


def aggregate_reports(reports: Sequence[DerReport]) -> DerReport:
    """Corpus-level report: per-recording fractions weighted by scored speech."""
    weights = np.array([r.scored_speech for r in reports], dtype=np.float64)
    total = float(weights.sum())
    if total == 0.0:
        return DerReport(der=0.0, missed=0.0, false_alarm=0.0, confusion=0.0, scored_speech=0.0)

    def weighted(attr: str) -> float:
        return float(np.dot(weights, [getattr(r, attr) for r in reports]) / total)

    missed, false_alarm, confusion = weighted("missed"), weighted("false_alarm"), weighted("confusion")
    return DerReport(
        der=missed + false_alarm + confusion,
        missed=missed,
        false_alarm=false_alarm,
        confusion=confusion,
        scored_speech=total,
    )
