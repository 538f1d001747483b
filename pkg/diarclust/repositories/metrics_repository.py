"""
Metrics repository: training history and DER reports as CSV / JSON.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import pandas as pd

from diarclust.schemas.report import DerReport, EpochMetrics

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6f"


class MetricsRepository:
    """Repository for metric tables."""

    def __init__(self, base_dir: Union[str, Path] = "."):
        self.base_dir = Path(base_dir)

    def _target(self, name: Union[str, Path]) -> Path:
        path = Path(name)
        path = path if path.is_absolute() else self.base_dir / path
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_epochs(self, history: Sequence[EpochMetrics], name: Union[str, Path] = "metrics.csv") -> Path:
        """One row per epoch; NaN cells are written as empty fields."""
        path = self._target(name)
        frame = pd.DataFrame([row.model_dump() for row in history], columns=list(EpochMetrics.model_fields))
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Wrote {len(history)} epoch rows to {path}")
        return path

    def read_epochs(self, name: Union[str, Path] = "metrics.csv") -> List[EpochMetrics]:
        frame = pd.read_csv(self.base_dir / name)
        return [EpochMetrics(**record) for record in frame.to_dict(orient="records")]

    def write_der(self, reports: Dict[str, DerReport], name: Union[str, Path] = "der.csv") -> Path:
        """Per-recording DER table keyed by recording id."""
        path = self._target(name)
        frame = pd.DataFrame(
            [{"recording_id": rid, **report.model_dump()} for rid, report in reports.items()],
            columns=["recording_id", *DerReport.model_fields],
        )
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Wrote DER table to {path}")
        return path

    def write_der_by_speakers(
        self,
        reports: Dict[int, DerReport],
        counts: Dict[int, int],
        name: Union[str, Path] = "der_by_speakers.csv",
    ) -> Path:
        """One row per reference speaker count with the number of recordings behind it."""
        path = self._target(name)
        frame = pd.DataFrame(
            [{"n_speakers": n, "recordings": counts.get(n, 0), **report.model_dump()} for n, report in reports.items()],
            columns=["n_speakers", "recordings", *DerReport.model_fields],
        )
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        logger.info(f"Wrote per-speaker-count DER table to {path}")
        return path

    def write_der_json(self, report: DerReport, name: Union[str, Path] = "der.json") -> Path:
        path = self._target(name)
        path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        return path
