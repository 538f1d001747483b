"""
Shared fixtures for the diarclust test suite.
"""

import os

import numpy as np
import pytest

from diarclust.config import reset_settings
from diarclust.igmm import sample_generative
from diarclust.schemas.hyper import IgmmHyper
from diarclust.utils.helpers import make_rng

PLANTED_SCALE = 10.0 / np.sqrt(2.0)


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Every test starts from default settings, whatever the environment holds."""
    for key in list(os.environ):
        if key.startswith("DIARCLUST_"):
            monkeypatch.delenv(key)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def planted_hyper():
    return IgmmHyper(alpha=1.0, k_trunc=10, em_iters=10, dim=16)


def planted_sample(seed: int, n: int = 60, dim: int = 16):
    """Four unit-precision clusters whose means are pairwise 10 apart."""
    means = np.zeros((4, dim))
    means[np.arange(4), np.arange(4)] = PLANTED_SCALE
    return sample_generative(
        IgmmHyper(alpha=1.0, k_trunc=10, dim=dim),
        n,
        seed,
        means=means,
        precisions=np.ones(4),
        weights=np.full(4, 0.25),
    )


@pytest.fixture
def planted():
    return planted_sample(seed=7)


def random_responsibilities(rng, n: int, k: int) -> np.ndarray:
    logits = rng.standard_normal((n, k))
    weights = np.exp(logits)
    return weights / weights.sum(axis=1, keepdims=True)
