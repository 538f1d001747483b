"""
Parameter container for the feed-forward chunk encoder.
"""

from dataclasses import dataclass, fields
from typing import Any, Callable, Dict, Tuple

import numpy as np

from diarclust.autodiff.ops import value_of
from diarclust.autodiff.tensor import Tape
from diarclust.exceptions import ShapeMismatchError
from diarclust.schemas.hyper import EncoderConfig


@dataclass
class EncoderParams:
    """
    Trunk (w1, w2), activity head, embedding head and speaker-ID classifier.

    Entries are numpy arrays for inference and Tensors while a training step
    records on a tape.
    """

    w1: Any
    b1: Any
    w2: Any
    b2: Any
    w_act: Any
    b_act: Any
    w_emb: Any
    b_emb: Any
    w_spk: Any
    b_spk: Any

    @classmethod
    def names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    @classmethod
    def expected_shapes(cls, config: EncoderConfig) -> Dict[str, Tuple[int, ...]]:
        f, d, s = config.feature_dim, config.width, config.s_local
        c, m = config.embed_dim, config.inventory_size
        return {
            "w1": (f, d), "b1": (d,),
            "w2": (d, d), "b2": (d,),
            "w_act": (d, s), "b_act": (s,),
            "w_emb": (d, c), "b_emb": (c,),
            "w_spk": (c, m), "b_spk": (m,),
        }

    def as_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.names()}

    @classmethod
    def from_dict(cls, arrays: Dict[str, Any]) -> "EncoderParams":
        missing = set(cls.names()) - set(arrays)
        if missing:
            raise ShapeMismatchError(f"missing encoder parameters: {sorted(missing)}")
        return cls(**{name: arrays[name] for name in cls.names()})

    def map(self, fn: Callable[[str, Any], Any]) -> "EncoderParams":
        return EncoderParams(**{name: fn(name, value) for name, value in self.as_dict().items()})

    def values(self) -> "EncoderParams":
        """Plain numpy copy with any tape links dropped."""
        return self.map(lambda _, v: np.array(value_of(v), dtype=np.float64, copy=True))

    def on_tape(self, tape: Tape) -> "EncoderParams":
        """Register every array as a differentiable variable of `tape`."""
        return self.map(lambda name, v: tape.variable(value_of(v), name=name))

    def check_shapes(self, config: EncoderConfig) -> None:
        for name, shape in self.expected_shapes(config).items():
            actual = np.shape(value_of(getattr(self, name)))
            if actual != shape:
                raise ShapeMismatchError(f"{name} has shape {actual}, expected {shape}")

    def flat(self) -> np.ndarray:
        return np.concatenate([np.ravel(value_of(v)) for v in self.as_dict().values()])
