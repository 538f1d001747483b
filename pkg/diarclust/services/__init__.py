"""
Services used by the command-line entry point.
"""

from .clustering_service import ClusteringService
from .diarization_service import DiarizationService
from .scoring_service import ScoringService
from .synth_service import SynthService
from .training_service import TrainingService

__all__ = ["ClusteringService", "DiarizationService", "ScoringService", "SynthService", "TrainingService"]
