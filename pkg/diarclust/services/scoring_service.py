"""
DER scoring service.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Tuple

from diarclust.config import Settings
from diarclust.models.timeline import DiarTimeline
from diarclust.repositories.rttm_repository import RttmRepository
from diarclust.schemas.report import DerReport
from diarclust.scoring.der import aggregate_reports, score_der

logger = logging.getLogger(__name__)


class ScoringService:
    """Service for scoring hypothesis RTTM files against references."""

    def __init__(self, settings: Settings):
        self.settings = settings
        self.rttm_repo = RttmRepository()

    def score(
        self, ref_path: str, hyp_path: str, collar: float, workers: Optional[int] = None
    ) -> Tuple[Dict[str, DerReport], DerReport]:
        """
        Score every reference recording; recordings missing from the
        hypothesis are scored against an empty timeline.

        Returns:
            tuple: (per-recording reports, speech-weighted overall report)
        """
        refs = self.rttm_repo.read_all(ref_path)
        hyps = self.rttm_repo.read_all(hyp_path)
        for rid in sorted(set(hyps) - set(refs)):
            logger.warning(f"Hypothesis recording {rid} has no reference; ignored")

        ids = sorted(refs)
        if workers is None:
            workers = self.settings.SCORING_WORKERS

        def score_one(rid: str) -> DerReport:
            return score_der(refs[rid], hyps.get(rid, DiarTimeline()), collar)

        if workers > 1 and len(ids) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(score_one, ids))
        else:
            reports = [score_one(rid) for rid in ids]

        per_recording = dict(zip(ids, reports))
        overall = aggregate_reports(reports)
        logger.info(f"Scored {len(ids)} recordings: DER {overall.der:.4f}")
        return per_recording, overall
