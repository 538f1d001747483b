"""
diarclust
Trainable nonparametric clustering for chunk-wise speaker diarization:
unfolded variational-Bayes iGMM, the continuous ARI loss, PIT diarization
loss, and a desk-scale encode/cluster/stitch/score pipeline.
"""

__version__ = "1.0.0"
__author__ = "diarclust developers"
