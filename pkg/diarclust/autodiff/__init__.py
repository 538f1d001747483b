"""
Reverse-mode automatic differentiation over numpy arrays.
"""

from . import ops
from .gradcheck import check_gradient, numerical_gradient, tape_gradients
from .ops import apply, is_recorded, value_of
from .tensor import Tape, Tensor

__all__ = [
    "ops",
    "apply",
    "is_recorded",
    "value_of",
    "Tape",
    "Tensor",
    "check_gradient",
    "numerical_gradient",
    "tape_gradients",
]
