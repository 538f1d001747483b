"""
RTTM repository.
"""

import logging
from pathlib import Path
from typing import Dict, Optional, Union

from diarclust.models.timeline import DiarTimeline
from diarclust.scoring.rttm import rttm_read, rttm_read_all, rttm_write

logger = logging.getLogger(__name__)


class RttmRepository:
    """Repository for RTTM files."""

    def __init__(self, base_dir: Union[str, Path] = "."):
        self.base_dir = Path(base_dir)

    def _path(self, name: Union[str, Path]) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_dir / path

    def read(self, name: Union[str, Path], recording_id: Optional[str] = None) -> DiarTimeline:
        return rttm_read(self._path(name).read_text(encoding="utf-8"), recording_id)

    def read_all(self, name: Union[str, Path]) -> Dict[str, DiarTimeline]:
        return rttm_read_all(self._path(name).read_text(encoding="utf-8"))

    def write(self, timelines: Dict[str, DiarTimeline], name: Union[str, Path]) -> Path:
        """Write several recordings into one file, recording ids in sorted order."""
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(rttm_write(timelines[rid], rid) for rid in sorted(timelines)), encoding="utf-8")
        logger.info(f"Wrote RTTM for {len(timelines)} recordings to {path}")
        return path
