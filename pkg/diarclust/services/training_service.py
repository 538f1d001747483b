"""
Training service.
"""

import logging
from pathlib import Path

from diarclust.pipeline.encoder import init_encoder
from diarclust.pipeline.training import train
from diarclust.repositories.checkpoint_repository import CheckpointRepository
from diarclust.repositories.corpus_repository import CorpusRepository
from diarclust.repositories.metrics_repository import MetricsRepository
from diarclust.schemas.common import CommandResult
from diarclust.schemas.hyper import EncoderConfig
from diarclust.schemas.run import RunConfig

logger = logging.getLogger(__name__)


class TrainingService:
    """Service for training the encoder on a stored corpus."""

    def train(self, run: RunConfig, heldout: int = 0) -> CommandResult:
        """
        Train on the corpus named in `run`; the last `heldout` recordings are
        kept out for the per-epoch DER and ARI.

        Returns:
            CommandResult: Final metrics and written files

        Raises:
            TrainingDivergedError: If a loss becomes non-finite
        """
        if not run.corpus:
            raise ValueError("train needs --corpus")
        corpus = CorpusRepository().load(run.corpus)
        if heldout < 0 or heldout >= len(corpus.recordings):
            raise ValueError(f"--heldout must be in [0, {len(corpus.recordings) - 1}]")
        split = len(corpus.recordings) - heldout
        train_set, heldout_set = corpus.recordings[:split], corpus.recordings[split:]

        encoder = EncoderConfig(
            feature_dim=corpus.config.feature_dim,
            width=run.encoder_width,
            s_local=run.s_local,
            embed_dim=run.embed_dim,
            inventory_size=corpus.config.inventory_size,
        )
        config = run.train_config()
        logger.info(
            f"Training on {len(train_set)} recordings ({len(heldout_set)} held out) "
            f"for {config.epochs} epochs, lambda1={config.weights.lambda1}, lambda2={config.weights.lambda2}"
        )
        params, history = train(init_encoder(encoder, run.seed), train_set, config, heldout_set)

        out_dir = Path(run.out_dir or ".")
        metrics_path = MetricsRepository(out_dir).write_epochs(history)
        checkpoint_path = CheckpointRepository(out_dir).save(params, encoder, run.seed)
        last = history[-1]
        message = f"epoch {last.epoch}: L_total {last.L_total:.4f}, ARI {last.ARI:.4f}, DER {last.DER:.4f}"
        return CommandResult(message=message, outputs=[str(metrics_path), str(checkpoint_path)])
