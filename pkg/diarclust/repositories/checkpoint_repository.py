"""
Checkpoint repository: encoder weights as JSON.
"""

import logging
from pathlib import Path
from typing import Tuple, Union

from diarclust.models.encoder import EncoderParams
from diarclust.schemas.common import ArrayPayload
from diarclust.schemas.corpus import FORMAT_VERSION, CheckpointPayload
from diarclust.schemas.hyper import EncoderConfig

logger = logging.getLogger(__name__)


class CheckpointRepository:
    """Repository for encoder checkpoints."""

    def __init__(self, base_dir: Union[str, Path] = "."):
        self.base_dir = Path(base_dir)

    def save(
        self,
        params: EncoderParams,
        config: EncoderConfig,
        seed: int,
        name: Union[str, Path] = "checkpoint.json",
    ) -> Path:
        """
        Write encoder parameters with their layer sizes.

        Returns:
            Path: The written file
        """
        params.check_shapes(config)
        payload = CheckpointPayload(
            version=FORMAT_VERSION,
            seed=seed,
            encoder=config,
            params={name_: ArrayPayload.from_array(value) for name_, value in params.values().as_dict().items()},
        )
        path = self.base_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(payload.model_dump_json(), encoding="utf-8")
        logger.info(f"Wrote checkpoint to {path}")
        return path

    def load(self, name: Union[str, Path] = "checkpoint.json") -> Tuple[EncoderParams, EncoderConfig]:
        """Read a checkpoint; shapes are checked against its encoder config."""
        path = self.base_dir / name
        payload = CheckpointPayload.model_validate_json(path.read_text(encoding="utf-8"))
        params = EncoderParams.from_dict({k: v.to_array() for k, v in payload.params.items()})
        params.check_shapes(payload.encoder)
        return params, payload.encoder
