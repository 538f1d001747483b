"""
Desk-scale diarization pipeline: synthesis, chunking, encoding, stitching
and training.
"""

from .chunking import chunk_recording
from .encoder import detect_silent_slots, encode_chunk, init_encoder
from .stitching import gather_embeddings, stitch
from .synth import SpeakerInventory, SyntheticCorpus, synth_corpus, synth_recording
from .training import evaluate, recording_losses, sgd_step, train

__all__ = [
    "chunk_recording",
    "detect_silent_slots", "encode_chunk", "init_encoder",
    "gather_embeddings", "stitch",
    "SpeakerInventory", "SyntheticCorpus", "synth_corpus", "synth_recording",
    "evaluate", "recording_losses", "sgd_step", "train",
]
