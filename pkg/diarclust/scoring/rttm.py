"""
RTTM reading and writing.
"""

from typing import Dict, List, Optional, Tuple

from diarclust.exceptions import RttmParseError
from diarclust.models.timeline import DiarTimeline

RTTM_LINE = "SPEAKER {rid} 1 {start:.3f} {dur:.3f} <NA> <NA> {spk} <NA> <NA>"


def rttm_write(timeline: DiarTimeline, recording_id: str) -> str:
    """One SPEAKER line per segment, speakers sorted, seconds to 3 decimals."""
    lines = []
    for speaker in timeline.speakers:
        for start, end in sorted(timeline.segments[speaker]):
            lines.append(RTTM_LINE.format(rid=recording_id, start=start, dur=end - start, spk=speaker))
    return "\n".join(lines) + "\n" if lines else ""


def _merge(segments: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for start, end in sorted(segments):
        if merged and start < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def rttm_read_all(text: str) -> Dict[str, DiarTimeline]:
    """
    Parse RTTM text into one timeline per recording id.

    Blank lines and ';;' comments are skipped, as are record types other than
    SPEAKER. Overlapping segments of one speaker are merged.

    Raises:
        RttmParseError: With the 1-based line number of the first bad line
    """
    raw: Dict[str, Dict[str, List[Tuple[float, float]]]] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";;"):
            continue
        fields = stripped.split()
        if fields[0] != "SPEAKER":
            continue
        if len(fields) < 8:
            raise RttmParseError(f"expected at least 8 fields, got {len(fields)}", line_number)
        try:
            start = float(fields[3])
            duration = float(fields[4])
        except ValueError:
            raise RttmParseError(f"bad onset/duration {fields[3]!r} {fields[4]!r}", line_number)
        if start < 0 or duration <= 0 or start != start or duration != duration:
            raise RttmParseError(f"invalid segment onset={start} duration={duration}", line_number)
        segment = (round(start, 3), round(start + duration, 3))
        raw.setdefault(fields[1], {}).setdefault(fields[7], []).append(segment)

    return {
        rid: DiarTimeline({spk: _merge(segs) for spk, segs in speakers.items()})
        for rid, speakers in raw.items()
    }


def rttm_read(text: str, recording_id: Optional[str] = None) -> DiarTimeline:
    """
    Parse the RTTM lines of one recording.

    Args:
        text: RTTM content
        recording_id: Recording to keep; required when several are present

    Returns:
        DiarTimeline: Empty when no matching lines exist
    """
    timelines = rttm_read_all(text)
    if recording_id is not None:
        return timelines.get(recording_id, DiarTimeline())
    if len(timelines) > 1:
        raise ValueError(f"RTTM holds several recordings {sorted(timelines)}; pass recording_id")
    return next(iter(timelines.values()), DiarTimeline())
