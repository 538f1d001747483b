"""
Corpus repository: JSON synthetic corpora and their reference RTTM.
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from diarclust.models.recording import Recording
from diarclust.models.timeline import DiarTimeline
from diarclust.pipeline.synth import SpeakerInventory, SyntheticCorpus
from diarclust.schemas.common import ArrayPayload
from diarclust.schemas.corpus import FORMAT_VERSION, CorpusPayload, RecordingPayload
from diarclust.scoring.rttm import rttm_write

logger = logging.getLogger(__name__)


def reference_timeline(rec: Recording) -> DiarTimeline:
    """Ground-truth timeline with speakers named by inventory id."""
    labels = [f"spk{speaker_id}" for speaker_id in rec.speaker_ids]
    return DiarTimeline.from_frames(rec.activities, rec.frame_period, labels)


class CorpusRepository:
    """Repository for synthetic corpus files."""

    def __init__(self, base_dir: Union[str, Path] = "."):
        self.base_dir = Path(base_dir)

    def _path(self, name: Union[str, Path]) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.base_dir / path

    def to_payload(self, corpus: SyntheticCorpus) -> CorpusPayload:
        return CorpusPayload(
            version=FORMAT_VERSION,
            seed=corpus.seed,
            config=corpus.config,
            inventory=ArrayPayload.from_array(corpus.inventory.vectors),
            recordings=[
                RecordingPayload(
                    recording_id=rec.recording_id,
                    seed=rec.seed,
                    frame_period=rec.frame_period,
                    features=ArrayPayload.from_array(rec.features),
                    activities=ArrayPayload.from_array(rec.activities),
                    speaker_ids=list(rec.speaker_ids),
                )
                for rec in corpus.recordings
            ],
        )

    def from_payload(self, payload: CorpusPayload) -> SyntheticCorpus:
        recordings = [
            Recording(
                recording_id=item.recording_id,
                features=item.features.to_array(),
                activities=item.activities.to_array().astype(np.int8),
                speaker_ids=list(item.speaker_ids),
                frame_period=item.frame_period,
                seed=item.seed,
            )
            for item in payload.recordings
        ]
        return SyntheticCorpus(
            config=payload.config,
            seed=payload.seed,
            inventory=SpeakerInventory(payload.inventory.to_array()),
            recordings=recordings,
        )

    def save(self, corpus: SyntheticCorpus, name: Union[str, Path] = "corpus.json") -> Path:
        """
        Write the corpus as JSON.

        Args:
            corpus: Corpus to store
            name: File name, relative to the base directory

        Returns:
            Path: The written file
        """
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_payload(corpus).model_dump_json(), encoding="utf-8")
        logger.info(f"Wrote corpus with {len(corpus.recordings)} recordings to {path}")
        return path

    def load(self, name: Union[str, Path] = "corpus.json") -> SyntheticCorpus:
        """Read and validate a corpus JSON file."""
        path = self._path(name)
        payload = CorpusPayload.model_validate_json(path.read_text(encoding="utf-8"))
        if payload.version != FORMAT_VERSION:
            raise ValueError(f"unsupported corpus format version {payload.version}")
        return self.from_payload(payload)

    def save_reference(self, corpus: SyntheticCorpus, name: Union[str, Path] = "reference.rttm") -> Path:
        """Write the ground truth of every recording as one RTTM file."""
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = "".join(rttm_write(reference_timeline(rec), rec.recording_id) for rec in corpus.recordings)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote reference RTTM to {path}")
        return path
