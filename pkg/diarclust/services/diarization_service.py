"""
Diarization service: a trained checkpoint applied to a stored corpus.
"""

import logging
from collections import Counter
from pathlib import Path
from typing import Optional

from diarclust.config import Settings
from diarclust.exceptions import ShapeMismatchError
from diarclust.pipeline.training import evaluate, reports_by_speaker_count
from diarclust.repositories.checkpoint_repository import CheckpointRepository
from diarclust.repositories.corpus_repository import CorpusRepository
from diarclust.repositories.metrics_repository import MetricsRepository
from diarclust.repositories.rttm_repository import RttmRepository
from diarclust.schemas.common import CommandResult
from diarclust.schemas.run import RunConfig
from diarclust.scoring.der import aggregate_reports
from diarclust.utils.helpers import format_percent

logger = logging.getLogger(__name__)


class DiarizationService:
    """Service for diarizing a corpus with a trained encoder."""

    def __init__(self, settings: Settings):
        self.settings = settings

    def diarize(self, run: RunConfig, backend: str = "igmm", ahc_threshold: Optional[float] = None) -> CommandResult:
        """
        Encode, cluster and stitch every recording of the corpus named in `run`.

        Writes hypothesis.rttm, der.csv, der_by_speakers.csv and der.json.
        Layer sizes come from the checkpoint, so `run.embed_dim` and
        `run.s_local` are ignored.

        Returns:
            CommandResult: Overall and per-speaker-count DER lines and the written files
        """
        if not run.corpus or not run.checkpoint:
            raise ValueError("diarize needs --corpus and --checkpoint")
        params, encoder = CheckpointRepository().load(run.checkpoint)
        corpus = CorpusRepository().load(run.corpus)
        if corpus.config.feature_dim != encoder.feature_dim:
            raise ShapeMismatchError(
                f"corpus features have {corpus.config.feature_dim} dims, checkpoint expects {encoder.feature_dim}"
            )
        config = run.model_copy(update={"embed_dim": encoder.embed_dim, "s_local": encoder.s_local}).train_config()
        threshold = self.settings.AHC_THRESHOLD if ahc_threshold is None else ahc_threshold

        results = evaluate(params, corpus.recordings, config, backend, threshold)
        if not results:
            raise ValueError(f"no recording spans a full chunk of {config.chunk_frames} frames")
        logger.info(f"Diarized {len(results)} recordings with the {backend} backend")

        out_dir = Path(run.out_dir or ".")
        metrics = MetricsRepository(out_dir)
        by_speakers = reports_by_speaker_count(results)
        counts = Counter(r.n_speakers for r in results)
        overall = aggregate_reports([r.report for r in results])
        outputs = [
            RttmRepository(out_dir).write({r.recording_id: r.hypothesis for r in results}, "hypothesis.rttm"),
            metrics.write_der({r.recording_id: r.report for r in results}),
            metrics.write_der_by_speakers(by_speakers, counts),
            metrics.write_der_json(overall),
        ]

        lines = [
            f"{backend}: DER {format_percent(overall.der)}  (MI {format_percent(overall.missed)} / "
            f"FA {format_percent(overall.false_alarm)} / CF {format_percent(overall.confusion)})"
        ]
        for n_speakers, report in by_speakers.items():
            lines.append(f"{n_speakers} speakers ({counts[n_speakers]} recordings): DER {format_percent(report.der)}")
        return CommandResult(message="\n".join(lines), outputs=[str(path) for path in outputs])
