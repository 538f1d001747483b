"""
Configuration settings for diarclust.
"""
import logging
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Run-wide defaults, overridable from the environment or a .env file."""

    # Logging
    LOG_LEVEL: str = Field(default="INFO", description="Logging level name")
    LOG_FILE: Optional[str] = Field(default=None, description="Optional log file path")

    # Reproducibility
    SEED: int = Field(default=0, ge=0, description="Default seed for every generator")

    # iGMM inference
    ALPHA: float = Field(default=1.0, gt=0, description="DP concentration parameter")
    K_TRUNC: int = Field(default=10, ge=1, description="Truncation level K'")
    EM_ITERS: int = Field(default=10, ge=0, description="Unfolded EM iterations")
    STICK_PRIOR: str = Field(default="following", description="Stick term order in the E-step")
    INIT_METHOD: str = Field(default="soft-kmeans", description="Responsibility initializer")
    INIT_TEMPERATURE: float = Field(default=1.0, gt=0, description="Soft k-means temperature")
    MASS_THRESHOLD: float = Field(default=0.5, gt=0, description="Cluster mass counted as used")
    AHC_THRESHOLD: float = Field(default=0.5, gt=0, description="Constrained AHC cosine distance stop")

    # Chunking / encoder
    FRAME_PERIOD: float = Field(default=0.1, gt=0, description="Seconds per frame")
    CHUNK_FRAMES: int = Field(default=50, ge=1, description="Frames per chunk (T)")
    S_LOCAL: int = Field(default=3, ge=1, le=6, description="Output slots per chunk")
    EMBED_DIM: int = Field(default=16, ge=1, description="Speaker embedding dimension (C)")
    ENCODER_WIDTH: int = Field(default=32, ge=1, description="Encoder trunk width (D)")
    SILENCE_THRESHOLD: float = Field(default=0.05, description="Silent slot threshold")
    BINARIZE_THRESHOLD: float = Field(default=0.5, description="Activity binarization threshold")

    # Synthetic corpus
    FEATURE_DIM: int = Field(default=8, ge=1, description="Frame feature dimension (F)")
    CHUNKS_PER_RECORDING: int = Field(default=20, ge=1, description="Recording length in chunks")
    INVENTORY_SIZE: int = Field(default=16, ge=1, description="Training speaker inventory size")
    OVERLAP: float = Field(default=0.2, ge=0, lt=1, description="Overlapped frame fraction")
    NOISE: float = Field(default=0.3, ge=0, description="Feature noise standard deviation")

    # Training
    LAMBDA1: float = Field(default=0.05, ge=0, le=1, description="Cluster loss weight")
    LAMBDA2: float = Field(default=0.03, ge=0, le=1, description="Speaker-ID loss weight")
    LEARNING_RATE: float = Field(default=0.05, gt=0, description="SGD step size")
    EPOCHS: int = Field(default=30, ge=1, description="Training epochs")

    # Scoring
    COLLAR: float = Field(default=0.25, ge=0, description="DER collar in seconds")
    SCORING_WORKERS: int = Field(default=1, ge=1, description="Threads for corpus scoring")

    model_config = SettingsConfigDict(
        env_prefix="DIARCLUST_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Accept only level names the logging module knows."""
        name = v.upper()
        if not isinstance(logging.getLevelName(name), int):
            raise ValueError(f"Unknown log level: {v}")
        return name

    @field_validator("SILENCE_THRESHOLD", "BINARIZE_THRESHOLD")
    @classmethod
    def validate_open_unit(cls, v: float) -> float:
        """Thresholds must lie strictly inside (0, 1)."""
        if not 0.0 < v < 1.0:
            raise ValueError("Threshold must be in (0, 1)")
        return v

    @field_validator("STICK_PRIOR")
    @classmethod
    def validate_stick_prior(cls, v: str) -> str:
        if v not in ("following", "preceding"):
            raise ValueError("STICK_PRIOR must be 'following' or 'preceding'")
        return v

    @field_validator("INIT_METHOD")
    @classmethod
    def validate_init_method(cls, v: str) -> str:
        if v not in ("uniform", "soft-kmeans"):
            raise ValueError("INIT_METHOD must be 'uniform' or 'soft-kmeans'")
        return v


# Global settings instance
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get run settings (singleton pattern)."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
