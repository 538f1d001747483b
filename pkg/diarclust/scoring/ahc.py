"""
Constrained agglomerative clustering baseline.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from diarclust.autodiff.ops import value_of
from diarclust.exceptions import InfeasibleConstraintError
from diarclust.models.embedding import EmbeddingSet
from diarclust.utils.validators import validate_cannot_link

logger = logging.getLogger(__name__)


def _first_appearance(labels: np.ndarray) -> np.ndarray:
    mapping = {}
    return np.array([mapping.setdefault(int(l), len(mapping)) for l in labels], dtype=np.int64)


def constrained_ahc(
    embeddings,
    cannot_link: Optional[Sequence[Tuple[int, int]]] = None,
    threshold: Optional[float] = None,
    n_clusters: Optional[int] = None,
) -> np.ndarray:
    """
    Average-linkage AHC on cosine distance that never joins a cannot-link pair.

    Merging stops once the closest mergeable pair is farther than `threshold`
    or the cluster count reaches `n_clusters`, whichever comes first.

    Args:
        embeddings: N x C matrix or EmbeddingSet (its same-chunk pairs are used
            when cannot_link is None)
        cannot_link: Index pairs that must stay apart
        threshold: Distance stop criterion
        n_clusters: Target cluster count

    Returns:
        np.ndarray: Labels numbered in order of first appearance

    Raises:
        InfeasibleConstraintError: If the constraints leave more than n_clusters clusters
    """
    if threshold is None and n_clusters is None:
        raise ValueError("give a distance threshold or a target cluster count")
    if isinstance(embeddings, EmbeddingSet):
        if cannot_link is None:
            cannot_link = embeddings.cannot_link_pairs()
        embeddings = embeddings.matrix
    values = np.asarray(value_of(embeddings), dtype=np.float64)
    n = values.shape[0]
    if n_clusters is not None and not 1 <= n_clusters <= max(n, 1):
        raise ValueError(f"n_clusters must be in [1, {n}]")
    pairs = list(cannot_link or [])
    is_valid, error = validate_cannot_link(pairs, n)
    if not is_valid:
        raise ValueError(error)
    if n == 0:
        return np.zeros(0, dtype=np.int64)

    dist = np.nan_to_num(cdist(values, values, metric="cosine"), nan=1.0)
    np.fill_diagonal(dist, np.inf)
    blocked = np.zeros((n, n), dtype=bool)
    for i, j in pairs:
        blocked[i, j] = blocked[j, i] = True

    labels = np.arange(n)
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    count = n
    exhausted = False
    while count > 1 and (n_clusters is None or count > n_clusters):
        candidate = np.where(blocked | ~active[:, None] | ~active[None, :], np.inf, dist)
        flat = int(np.argmin(candidate))
        i, j = divmod(flat, n)
        best = candidate[i, j]
        if not np.isfinite(best):
            exhausted = True
            break
        if threshold is not None and best > threshold:
            break
        i, j = min(i, j), max(i, j)

        # Lance-Williams update for average linkage
        merged = (sizes[i] * dist[i] + sizes[j] * dist[j]) / (sizes[i] + sizes[j])
        dist[i, :] = merged
        dist[:, i] = merged
        dist[i, i] = np.inf
        blocked[i, :] |= blocked[j, :]
        blocked[:, i] |= blocked[:, j]
        sizes[i] += sizes[j]
        active[j] = False
        labels[labels == j] = i
        count -= 1

    if exhausted and n_clusters is not None and count > n_clusters:
        raise InfeasibleConstraintError(
            f"cannot-link constraints leave {count} clusters, more than the requested {n_clusters}"
        )
    return _first_appearance(labels)
