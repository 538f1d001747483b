"""
Synthetic corpus generation service.
"""

import logging
from pathlib import Path

from diarclust.pipeline.synth import synth_corpus
from diarclust.repositories.corpus_repository import CorpusRepository
from diarclust.schemas.common import CommandResult
from diarclust.schemas.hyper import SynthConfig

logger = logging.getLogger(__name__)


class SynthService:
    """Service for writing seeded synthetic corpora."""

    def generate(self, config: SynthConfig, n_recordings: int, seed: int, out_dir: str) -> CommandResult:
        """
        Generate a corpus and write corpus.json plus reference.rttm.

        Args:
            config: Generator settings
            n_recordings: Number of recordings
            seed: Corpus seed
            out_dir: Output directory

        Returns:
            CommandResult: Summary counts and written files
        """
        corpus = synth_corpus(config, n_recordings, seed)
        repo = CorpusRepository(Path(out_dir))
        corpus_path = repo.save(corpus)
        rttm_path = repo.save_reference(corpus)

        frames = sum(rec.n_frames for rec in corpus.recordings)
        speakers = sum(rec.n_speakers for rec in corpus.recordings)
        overlapped = sum(int((rec.activities.sum(axis=1) >= 2).sum()) for rec in corpus.recordings)
        message = (
            f"{n_recordings} recordings, {frames} frames, {speakers} speaker tracks, "
            f"{overlapped} overlapped frames"
        )
        logger.info(f"Synthesized corpus: {message}")
        return CommandResult(message=message, outputs=[str(corpus_path), str(rttm_path)])
