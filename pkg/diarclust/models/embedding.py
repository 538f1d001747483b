"""
Embedding sets and iGMM parameter containers.

Arrays held here may be numpy arrays or tape Tensors; the inference code is
agnostic to which.
"""

from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

import numpy as np

from diarclust.autodiff.ops import value_of
from diarclust.exceptions import ShapeMismatchError
from diarclust.utils.validators import validate_finite


@dataclass
class EmbeddingSet:
    """N x C speaker embeddings with the (chunk, slot) pair behind each row."""

    matrix: Any
    index: List[Tuple[int, int]]

    def __post_init__(self):
        values = np.asarray(value_of(self.matrix))
        if values.ndim != 2:
            raise ShapeMismatchError(f"embeddings must be N x C, got shape {values.shape}")
        if len(self.index) != values.shape[0]:
            raise ShapeMismatchError(
                f"index map has {len(self.index)} entries for {values.shape[0]} embeddings"
            )
        if len(set(self.index)) != len(self.index):
            raise ShapeMismatchError("index map must not repeat a (chunk, slot) pair")
        is_valid, error = validate_finite(values, "embeddings")
        if not is_valid:
            raise ValueError(error)
        self.index = [(int(i), int(s)) for i, s in self.index]

    @classmethod
    def from_array(cls, matrix, index: Optional[List[Tuple[int, int]]] = None) -> "EmbeddingSet":
        """Wrap a bare matrix; without an index every row is its own chunk."""
        n = np.shape(value_of(matrix))[0]
        return cls(matrix, index if index is not None else [(i, 0) for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def dim(self) -> int:
        return int(np.shape(value_of(self.matrix))[1])

    def values(self) -> np.ndarray:
        return np.asarray(value_of(self.matrix), dtype=np.float64)

    def chunk_ids(self) -> np.ndarray:
        return np.array([i for i, _ in self.index], dtype=np.int64)

    def cannot_link_pairs(self) -> List[Tuple[int, int]]:
        """Pairs of rows that come from the same chunk."""
        chunks = self.chunk_ids()
        pairs = []
        for n in range(self.n):
            for m in range(n + 1, self.n):
                if chunks[n] == chunks[m]:
                    pairs.append((n, m))
        return pairs


@dataclass
class VariationalParams:
    """Per-cluster posterior parameters: sticks (gamma1, gamma2), means theta, precision (a, b)."""

    gamma1: Any
    gamma2: Any
    theta: Any
    a: Any
    b: Any

    @classmethod
    def initial(cls, k_trunc: int, dim: int, alpha: float) -> "VariationalParams":
        """Prior-mean starting point: a = b = 1, theta = 0, empty sticks."""
        return cls(
            gamma1=np.ones(k_trunc),
            gamma2=np.full(k_trunc, float(alpha)),
            theta=np.zeros((k_trunc, dim)),
            a=np.ones(k_trunc),
            b=np.ones(k_trunc),
        )

    def values(self) -> "VariationalParams":
        return VariationalParams(*(np.asarray(value_of(x)) for x in
                                   (self.gamma1, self.gamma2, self.theta, self.a, self.b)))

    def check_invariants(
        self, alpha: float, max_norm: float, tol: float = 1e-9
    ) -> tuple[bool, Optional[str]]:
        """
        Check gamma1 >= 1, gamma2 >= alpha, a >= 1, b >= 1 and theta shrinkage.

        Returns:
            tuple: (is_valid, error_message)
        """
        p = self.values()
        if np.any(p.gamma1 < 1.0 - tol):
            return False, "gamma1 below 1"
        if np.any(p.gamma2 < alpha - tol):
            return False, "gamma2 below alpha"
        if np.any(p.a < 1.0 - tol) or np.any(p.b < 1.0 - tol):
            return False, "a or b below 1"
        norms = np.sqrt(np.sum(p.theta * p.theta, axis=1))
        if np.any(norms > max_norm + tol):
            return False, "theta outside the embedding norm ball"
        return True, None


@dataclass
class GenerativeSample:
    """Embeddings drawn from the stick-breaking generative process."""

    embeddings: np.ndarray
    assignments: np.ndarray
    stick_props: np.ndarray
    weights: np.ndarray
    means: np.ndarray
    precisions: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return int(self.embeddings.shape[0])

    def as_embedding_set(self) -> EmbeddingSet:
        return EmbeddingSet.from_array(self.embeddings)
