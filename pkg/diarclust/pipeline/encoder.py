"""
Feed-forward chunk encoder: joint slot activities and slot embeddings.
"""

import numpy as np

from diarclust.autodiff import ops as F
from diarclust.autodiff.ops import value_of
from diarclust.models.encoder import EncoderParams
from diarclust.models.recording import ChunkOutput
from diarclust.schemas.hyper import EncoderConfig
from diarclust.utils.helpers import make_rng

AVG_EPS = 1e-6


def init_encoder(config: EncoderConfig, seed: int) -> EncoderParams:
    """
    Random encoder weights scaled by 1/sqrt(fan_in); biases start at zero.

    Args:
        config: Layer sizes
        seed: Generator seed

    Returns:
        EncoderParams: Plain numpy parameters
    """
    rng = make_rng(seed)
    arrays = {}
    for name, shape in EncoderParams.expected_shapes(config).items():
        if len(shape) == 1:
            arrays[name] = np.zeros(shape)
        else:
            arrays[name] = rng.standard_normal(shape) / np.sqrt(shape[0])
    return EncoderParams.from_dict(arrays)


def detect_silent_slots(activities, threshold: float = 0.05) -> np.ndarray:
    """Slot s is silent iff its mean activity over frames is below `threshold`."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("silence threshold must be in (0, 1)")
    return np.asarray(value_of(activities)).mean(axis=0) < threshold


def encode_chunk(
    features,
    params: EncoderParams,
    index: int = 0,
    start_frame: int = 0,
    silence_threshold: float = 0.05,
) -> ChunkOutput:
    """
    Trunk T x F -> T x D, then the activity head (sigmoid) and the embedding
    head averaged over frames with the estimated activities as weights.
    """
    hidden = F.tanh(F.add(F.matmul(features, params.w1), params.b1))
    hidden = F.tanh(F.add(F.matmul(hidden, params.w2), params.b2))
    activities = F.sigmoid(F.add(F.matmul(hidden, params.w_act), params.b_act))
    frame_emb = F.add(F.matmul(hidden, params.w_emb), params.b_emb)

    pooled = F.matmul(F.transpose(activities), frame_emb)
    mass = F.add(F.sum(activities, axis=0), AVG_EPS)
    n_slots = np.shape(value_of(activities))[1]
    embeddings = F.div(pooled, F.reshape(mass, (n_slots, 1)))

    return ChunkOutput(
        index=index,
        start_frame=start_frame,
        activities=activities,
        embeddings=embeddings,
        silent=detect_silent_slots(activities, silence_threshold),
    )
