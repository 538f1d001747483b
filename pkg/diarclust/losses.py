"""
Training objectives: PIT-BCE diarization loss, continuous ARI, speaker-ID
cross-entropy and their weighted combination.

Inputs may be numpy arrays or tape Tensors; results follow the inputs.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import adjusted_rand_score

from diarclust.autodiff import ops as F
from diarclust.autodiff.ops import value_of
from diarclust.exceptions import ResponsibilityValidationError, ShapeMismatchError
from diarclust.schemas.hyper import LossWeights
from diarclust.utils.helpers import permutations
from diarclust.utils.validators import validate_binary, validate_probability_row

BCE_EPS = 1e-7
MAX_PIT_SLOTS = 6


def _bce_sum(labels: np.ndarray, log_p, log_q):
    """Sum over all entries of -(y log p + (1 - y) log(1 - p))."""
    return F.neg(F.sum(F.add(F.mul(labels, log_p), F.mul(1.0 - labels, log_q))))


def pit_diar_loss(labels: np.ndarray, estimates) -> Tuple[object, Tuple[int, ...]]:
    """
    Permutation-invariant BCE between chunk labels and estimated activities.

    The loss of permutation phi pairs output slot s with label column phi[s];
    only the minimizing branch is recorded.

    Args:
        labels: T x S binary label matrix
        estimates: T x S activity estimates in [0, 1]

    Returns:
        tuple: (loss averaged over T*S, best permutation; lowest index on ties)

    Raises:
        ShapeMismatchError: If the shapes differ or S exceeds the enumeration limit
    """
    y = np.asarray(labels, dtype=np.float64)
    shape = np.shape(value_of(estimates))
    if y.ndim != 2 or y.shape != shape:
        raise ShapeMismatchError(f"labels {y.shape} and estimates {shape} must be equal T x S matrices")
    t, s = y.shape
    if t == 0 or s == 0:
        raise ShapeMismatchError("empty label matrix")
    if s > MAX_PIT_SLOTS:
        raise ShapeMismatchError(f"at most {MAX_PIT_SLOTS} slots supported, got {s}")
    is_valid, error = validate_binary(y)
    if not is_valid:
        raise ValueError(error)

    p = F.clip(estimates, BCE_EPS, 1.0 - BCE_EPS)
    log_p = F.log(p)
    log_q = F.log(F.sub(1.0, p))

    lp, lq = value_of(log_p), value_of(log_q)
    perms = permutations(s)
    scores = [float(_bce_sum(y[:, list(perm)], lp, lq)) for perm in perms]
    best = int(np.argmin(scores))
    perm = perms[best]
    loss = F.div(_bce_sum(y[:, list(perm)], log_p, log_q), float(t * s))
    return loss, perm


def total_variation_distance(r_n, r_m):
    """Half the L1 distance between two probability rows."""
    if np.shape(value_of(r_n)) != np.shape(value_of(r_m)):
        raise ShapeMismatchError("probability rows must have equal length")
    for row in (r_n, r_m):
        is_valid, error = validate_probability_row(value_of(row))
        if not is_valid:
            raise ResponsibilityValidationError(error)
    return F.mul(0.5, F.sum(F.absolute(F.sub(r_n, r_m))))


def pairwise_tv(R):
    """N x N matrix of total-variation distances between responsibility rows."""
    n, k = np.shape(value_of(R))
    diff = F.sub(F.reshape(R, (n, 1, k)), F.reshape(R, (1, n, k)))
    return F.mul(0.5, F.sum(F.absolute(diff), axis=2))


def _encode_labels(truth: Sequence) -> np.ndarray:
    _, codes = np.unique(np.asarray(truth), return_inverse=True)
    return codes.ravel()


def cari(R, truth: Sequence):
    """
    Continuous adjusted Rand index of soft assignments R against true labels.

    Pair counts are accumulated over n < n' with total-variation distances in
    place of the hard "different cluster" indicator, then combined as
    2(N1 N4 - N2 N3) / ((N1 + N2)(N2 + N4) + (N1 + N3)(N3 + N4)), the
    pair-counting form of the adjusted Rand index, so one-hot R reproduces
    exact_ari. When the denominator is zero the result is 1 if both
    partitions agree on every pair and 0 otherwise.

    Args:
        R: N x K responsibilities
        truth: N true labels (any hashable values)

    Returns:
        cARI, at most 1

    Raises:
        ShapeMismatchError: On length mismatch
        ValueError: If N < 2
    """
    shape = np.shape(value_of(R))
    codes = _encode_labels(truth)
    if len(shape) != 2 or shape[0] != len(codes):
        raise ShapeMismatchError(f"responsibilities {shape} do not match {len(codes)} labels")
    n = shape[0]
    if n < 2:
        raise ValueError("cARI needs at least two embeddings")

    upper = np.triu(np.ones((n, n)), k=1)
    same = upper * (codes[:, None] == codes[None, :])
    different = upper - same

    dist = pairwise_tv(R)
    n1 = F.sum(F.mul(dist, different))
    n3 = F.sum(F.mul(dist, same))
    n2 = F.sub(float(different.sum()), n1)
    n4 = F.sub(float(same.sum()), n3)

    denom = F.add(
        F.mul(F.add(n1, n2), F.add(n2, n4)),
        F.mul(F.add(n1, n3), F.add(n3, n4)),
    )
    if float(value_of(denom)) == 0.0:
        agree = float(value_of(n2)) == 0.0 and float(value_of(n3)) == 0.0
        return F.add(F.mul(n1, 0.0), 1.0 if agree else 0.0)
    numer = F.mul(2.0, F.sub(F.mul(n1, n4), F.mul(n2, n3)))
    return F.div(numer, denom)


def exact_ari(pred_labels: Sequence, true_labels: Sequence) -> float:
    """Adjusted Rand index of two hard labelings."""
    if len(pred_labels) != len(true_labels):
        raise ShapeMismatchError("labelings must have equal length")
    if len(pred_labels) < 2:
        raise ValueError("ARI needs at least two items")
    return float(adjusted_rand_score(np.asarray(true_labels), np.asarray(pred_labels)))


def cluster_loss(R, truth: Sequence):
    """Negative cARI."""
    return F.neg(cari(R, truth))


def speaker_id_loss(embeddings, identities: Sequence[int], weight, bias):
    """
    Mean softmax cross-entropy of a linear speaker classifier.

    Args:
        embeddings: N x C retained slot embeddings
        identities: Inventory index per embedding
        weight: C x M classifier weights
        bias: M classifier biases

    Raises:
        ValueError: If an identity is outside [0, M)
    """
    ids = np.asarray(identities, dtype=np.int64)
    n = np.shape(value_of(embeddings))[0]
    m = np.shape(value_of(bias))[0]
    if ids.shape != (n,):
        raise ShapeMismatchError(f"{ids.shape[0] if ids.ndim else 0} identities for {n} embeddings")
    if n == 0:
        raise ValueError("speaker-ID loss needs at least one embedding")
    if np.any(ids < 0) or np.any(ids >= m):
        raise ValueError(f"speaker identity outside inventory of size {m}")

    logits = F.add(F.matmul(embeddings, weight), bias)
    log_probs = F.log_normalize(logits)
    picked = F.getitem(log_probs, (np.arange(n), ids))
    return F.div(F.neg(F.sum(picked)), float(n))


def total_loss(
    diar_loss,
    cluster_term: Optional[object],
    spk_term: Optional[object],
    weights: LossWeights,
):
    """
    (1 - l1 - l2) * L_diar + l1 * L_cluster + l2 * L_spk.

    A term with weight exactly 0 is left out, so its loss may be None.
    """
    terms = (
        (weights.diar_weight, diar_loss, "L_diar"),
        (weights.lambda1, cluster_term, "L_cluster"),
        (weights.lambda2, spk_term, "L_spk"),
    )
    total = None
    for weight, term, name in terms:
        if weight == 0.0:
            continue
        if term is None:
            raise ValueError(f"{name} is required when its weight is {weight}")
        scaled = F.mul(weight, term)
        total = scaled if total is None else F.add(total, scaled)
    return total
