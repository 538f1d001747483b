"""
Validated command-line run configuration.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from diarclust.schemas.hyper import IgmmHyper, LossWeights, TrainConfig


class RunConfig(BaseModel):
    """Flags of one CLI invocation after merging with settings defaults."""

    command: Literal["synth", "cluster", "train", "diarize", "score"]
    seed: int = Field(0, ge=0)

    alpha: float = Field(1.0, gt=0)
    k_trunc: int = Field(10, ge=1)
    em_iters: int = Field(10, ge=0)
    embed_dim: int = Field(16, ge=1)
    stick_prior: Literal["following", "preceding"] = "following"
    chunk_frames: int = Field(50, ge=1)
    s_local: int = Field(3, ge=1, le=6)
    encoder_width: int = Field(32, ge=1)
    lambda1: float = Field(0.05, ge=0, le=1)
    lambda2: float = Field(0.03, ge=0, le=1)
    silence_threshold: float = Field(0.05, gt=0, lt=1)
    binarize_threshold: float = Field(0.5, gt=0, lt=1)
    collar: float = Field(0.25, ge=0)
    learning_rate: float = Field(0.05, gt=0)
    epochs: int = Field(30, ge=1)
    init_method: Literal["uniform", "soft-kmeans"] = "soft-kmeans"
    init_temperature: float = Field(1.0, gt=0)
    mass_threshold: float = Field(0.5, gt=0)

    out_dir: Optional[str] = None
    corpus: Optional[str] = None
    checkpoint: Optional[str] = None
    embeddings: Optional[str] = None
    truth: Optional[str] = None
    ref: Optional[str] = None
    hyp: Optional[str] = None

    @model_validator(mode="after")
    def validate_bundles(self) -> "RunConfig":
        """Build the nested bundles once so their invariants are checked up front."""
        LossWeights(lambda1=self.lambda1, lambda2=self.lambda2)
        return self

    def igmm_hyper(self, dim: Optional[int] = None) -> IgmmHyper:
        return IgmmHyper(
            alpha=self.alpha,
            k_trunc=self.k_trunc,
            em_iters=self.em_iters,
            dim=dim if dim is not None else self.embed_dim,
            stick_prior=self.stick_prior,
        )

    def loss_weights(self) -> LossWeights:
        return LossWeights(lambda1=self.lambda1, lambda2=self.lambda2)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            hyper=self.igmm_hyper(),
            weights=self.loss_weights(),
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            seed=self.seed,
            chunk_frames=self.chunk_frames,
            s_local=self.s_local,
            init_method=self.init_method,
            init_temperature=self.init_temperature,
            silence_threshold=self.silence_threshold,
            binarize_threshold=self.binarize_threshold,
            collar=self.collar,
        )
