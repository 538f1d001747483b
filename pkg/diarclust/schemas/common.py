"""
Common schemas used across the package.
"""

from datetime import datetime, timezone
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class ArrayPayload(BaseModel):
    """A dense float array as its shape plus flat row-major data."""

    shape: List[int] = Field(..., description="Array shape")
    data: List[float] = Field(..., description="Row-major values")

    @model_validator(mode="after")
    def validate_size(self) -> "ArrayPayload":
        """Check that the data length matches the shape."""
        if any(dim < 0 for dim in self.shape):
            raise ValueError("shape entries must be non-negative")
        if int(np.prod(self.shape, dtype=np.int64)) != len(self.data):
            raise ValueError(
                f"shape {self.shape} needs {int(np.prod(self.shape))} values, got {len(self.data)}"
            )
        return self

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ArrayPayload":
        arr = np.asarray(array, dtype=np.float64)
        return cls(shape=list(arr.shape), data=arr.ravel(order="C").tolist())

    def to_array(self) -> np.ndarray:
        return np.asarray(self.data, dtype=np.float64).reshape(self.shape)


class CommandResult(BaseModel):
    """Summary returned by every CLI service call."""

    success: bool = True
    message: str = "Operation completed successfully"
    outputs: List[str] = Field(default_factory=list, description="Files written")
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))


class ErrorResult(BaseModel):
    """Error summary printed by the CLI."""

    success: bool = False
    error: str
    detail: Optional[str] = None
    exit_code: int = 1
