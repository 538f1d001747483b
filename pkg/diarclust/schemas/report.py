"""
Scoring and training report schemas.
"""

import math

from pydantic import BaseModel, Field, model_validator


class DerReport(BaseModel):
    """Diarization error rate with its missed / false-alarm / confusion split."""

    der: float = Field(..., ge=0, description="Total error fraction")
    missed: float = Field(..., ge=0, description="Missed speech fraction (MI)")
    false_alarm: float = Field(..., ge=0, description="False alarm fraction (FA)")
    confusion: float = Field(..., ge=0, description="Speaker confusion fraction (CF)")
    scored_speech: float = Field(..., ge=0, description="Scored reference speech in seconds")

    @model_validator(mode="after")
    def validate_additivity(self) -> "DerReport":
        if abs(self.der - (self.missed + self.false_alarm + self.confusion)) > 1e-9:
            raise ValueError("der must equal missed + false_alarm + confusion")
        return self

    class Config:
        json_schema_extra = {
            "example": {
                "der": 0.1842,
                "missed": 0.1842,
                "false_alarm": 0.0,
                "confusion": 0.0,
                "scored_speech": 9.5,
            }
        }


class EpochMetrics(BaseModel):
    """One row of the training metrics CSV."""

    epoch: int = Field(..., ge=1)
    L_diar: float
    L_cluster: float
    L_spk: float
    L_total: float
    ARI: float = Field(math.nan, description="Held-out mean exact ARI")
    DER: float = Field(math.nan, description="Held-out DER")
    MI: float = math.nan
    FA: float = math.nan
    CF: float = math.nan
