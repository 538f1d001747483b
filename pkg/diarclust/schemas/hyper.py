"""
Hyperparameter schemas for inference, losses, encoder and corpus synthesis.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class IgmmHyper(BaseModel):
    """Hyperparameters of the truncated spherical iGMM."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(1.0, gt=0, description="DP concentration")
    k_trunc: int = Field(10, ge=1, description="Truncation level K'")
    em_iters: int = Field(10, ge=0, description="Unfolded EM iterations")
    dim: int = Field(16, ge=1, description="Embedding dimension C")
    stick_prior: Literal["following", "preceding"] = Field(
        "following", description="Sticks summed in the E-step prior term"
    )


class LossWeights(BaseModel):
    """Multi-task weights; the diarization loss gets 1 - lambda1 - lambda2."""

    model_config = ConfigDict(frozen=True)

    lambda1: float = Field(0.05, ge=0, le=1, description="Cluster loss weight")
    lambda2: float = Field(0.03, ge=0, le=1, description="Speaker-ID loss weight")

    @model_validator(mode="after")
    def validate_sum(self) -> "LossWeights":
        if self.lambda1 + self.lambda2 > 1.0 + 1e-12:
            raise ValueError("lambda1 + lambda2 must not exceed 1")
        return self

    @property
    def diar_weight(self) -> float:
        return 1.0 - self.lambda1 - self.lambda2


class EncoderConfig(BaseModel):
    """Shapes of the feed-forward chunk encoder."""

    model_config = ConfigDict(frozen=True)

    feature_dim: int = Field(8, ge=1, description="Frame feature dimension F")
    width: int = Field(32, ge=1, description="Trunk width D")
    s_local: int = Field(3, ge=1, le=6, description="Output slots per chunk")
    embed_dim: int = Field(16, ge=1, description="Speaker embedding dimension C")
    inventory_size: int = Field(16, ge=1, description="Speaker-ID classifier classes")


class TrainConfig(BaseModel):
    """Everything the training loop needs besides the model and the corpus."""

    model_config = ConfigDict(frozen=True)

    hyper: IgmmHyper = Field(default_factory=IgmmHyper)
    weights: LossWeights = Field(default_factory=LossWeights)
    learning_rate: float = Field(0.05, gt=0, description="SGD step size")
    epochs: int = Field(30, ge=1, description="Passes over the training split")
    seed: int = Field(0, ge=0, description="Seed for the per-epoch shuffling of the training split")
    chunk_frames: int = Field(50, ge=1, description="Frames per chunk T")
    s_local: int = Field(3, ge=1, le=6, description="Output slots per chunk")
    init_method: Literal["uniform", "soft-kmeans"] = "soft-kmeans"
    init_temperature: float = Field(1.0, gt=0)
    silence_threshold: float = Field(0.05, gt=0, lt=1)
    binarize_threshold: float = Field(0.5, gt=0, lt=1)
    collar: float = Field(0.25, ge=0)


class SynthConfig(BaseModel):
    """Synthetic recording generator settings."""

    model_config = ConfigDict(frozen=True)

    speakers: int = Field(3, ge=1, description="S_Global (maximum when min_speakers is set)")
    min_speakers: Optional[int] = Field(None, ge=1, description="Lower bound of S_Global")
    frames: int = Field(1000, ge=1, description="Recording length L in frames")
    feature_dim: int = Field(8, ge=1, description="Frame feature dimension F")
    overlap: float = Field(0.2, ge=0, lt=1, description="Fraction of overlapped frames")
    noise: float = Field(0.3, ge=0, description="Isotropic feature noise std")
    min_turn: int = Field(20, ge=1, description="Shortest speaker turn in frames")
    max_turn: int = Field(60, ge=1, description="Longest speaker turn in frames")
    frame_period: float = Field(0.1, gt=0, description="Seconds per frame")
    inventory_size: int = Field(16, ge=1, description="Speakers in the identity inventory")

    @model_validator(mode="after")
    def validate_counts(self) -> "SynthConfig":
        if self.min_speakers is not None and self.min_speakers > self.speakers:
            raise ValueError("min_speakers must not exceed speakers")
        if self.speakers > self.inventory_size:
            raise ValueError("inventory_size must be at least speakers")
        if self.min_turn > self.max_turn:
            raise ValueError("min_turn must not exceed max_turn")
        return self

    @property
    def speaker_range(self) -> tuple[int, int]:
        low = self.min_speakers if self.min_speakers is not None else self.speakers
        return low, self.speakers
