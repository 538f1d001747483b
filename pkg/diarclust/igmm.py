"""
Spherical infinite Gaussian mixture: generative sampling, truncated VB EM
and the unfolded run used inside training.

Every update is written against `diarclust.autodiff.ops`, so the same code
runs on plain arrays or records on a tape when the embeddings are Tensors.
"""

import logging
from typing import Any, List, Optional, Union

import numpy as np

from diarclust.autodiff import ops as F
from diarclust.autodiff.ops import is_recorded, value_of
from diarclust.autodiff.tensor import Tape
from diarclust.exceptions import ResponsibilityValidationError, ShapeMismatchError
from diarclust.models.embedding import EmbeddingSet, GenerativeSample, VariationalParams
from diarclust.schemas.hyper import IgmmHyper
from diarclust.utils.helpers import make_rng, strictly_upper_ones
from diarclust.utils.validators import validate_row_stochastic

logger = logging.getLogger(__name__)

Embeddings = Union[EmbeddingSet, np.ndarray, Any]

INIT_METHODS = ("uniform", "soft-kmeans", "external")


def _matrix(embeddings: Embeddings):
    return embeddings.matrix if isinstance(embeddings, EmbeddingSet) else embeddings


def _check_dim(matrix, hyper: IgmmHyper) -> int:
    shape = np.shape(value_of(matrix))
    if len(shape) != 2:
        raise ShapeMismatchError(f"embeddings must be N x C, got shape {shape}")
    if shape[1] != hyper.dim:
        raise ShapeMismatchError(f"embedding dimension {shape[1]} does not match hyper.dim={hyper.dim}")
    return shape[1]


def sample_generative(
    hyper: IgmmHyper,
    n: int,
    seed: int,
    *,
    means: Optional[np.ndarray] = None,
    precisions: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
) -> GenerativeSample:
    """
    Draw N embeddings from the truncated stick-breaking process.

    Sticks eta_k ~ Beta(1, alpha) for k < K', means mu_k ~ N(0, I), precisions
    beta_k ~ Gamma(1, 1); assignments follow pi renormalized over the K'
    sticks and e_n ~ N(mu_{v_n}, beta_{v_n}^-1 I). Planted means, precisions
    or weights replace the corresponding draws.

    Args:
        hyper: Truncation, concentration and dimension
        n: Number of embeddings (0 gives an empty sample)
        seed: Generator seed
        means: Optional planted K x C means
        precisions: Optional planted K precisions
        weights: Optional planted K mixture weights

    Returns:
        GenerativeSample: Embeddings with their true assignments
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = make_rng(seed)
    dim = hyper.dim

    planted = [x for x in (means, precisions, weights) if x is not None]
    k = len(planted[0]) if planted else hyper.k_trunc
    if any(len(x) != k for x in planted):
        raise ShapeMismatchError("planted means, precisions and weights must agree on K")

    if weights is None:
        sticks = rng.beta(1.0, hyper.alpha, size=k)
        remaining = np.concatenate(([1.0], np.cumprod(1.0 - sticks)[:-1]))
        pi = sticks * remaining
    else:
        pi = np.asarray(weights, dtype=np.float64)
        if np.any(pi < 0) or pi.sum() > 1.0 + 1e-12:
            raise ValueError("planted weights must be non-negative and sum to at most 1")
        left = 1.0 - np.concatenate(([0.0], np.cumsum(pi)[:-1]))
        sticks = np.divide(pi, left, out=np.ones_like(pi), where=left > 0)

    mu = rng.standard_normal((k, dim)) if means is None else np.asarray(means, dtype=np.float64)
    if mu.shape != (k, dim):
        raise ShapeMismatchError(f"means must be {k} x {dim}, got {mu.shape}")
    beta = rng.gamma(1.0, 1.0, size=k) if precisions is None else np.asarray(precisions, dtype=np.float64)
    if np.any(beta <= 0):
        raise ValueError("precisions must be positive")

    if n == 0:
        return GenerativeSample(
            embeddings=np.zeros((0, dim)),
            assignments=np.zeros(0, dtype=np.int64),
            stick_props=sticks, weights=pi, means=mu, precisions=beta,
        )

    assignments = rng.choice(k, size=n, p=pi / pi.sum())
    noise = rng.standard_normal((n, dim))
    embeddings = mu[assignments] + noise / np.sqrt(beta[assignments])[:, None]
    return GenerativeSample(
        embeddings=embeddings,
        assignments=assignments.astype(np.int64),
        stick_props=sticks, weights=pi, means=mu, precisions=beta,
    )


def _farthest_point_centers(values: np.ndarray, k: int) -> np.ndarray:
    mean = values.mean(axis=0)
    first = int(np.argmax(np.sum((values - mean) ** 2, axis=1)))
    chosen = [first]
    closest = np.sum((values - values[first]) ** 2, axis=1)
    while len(chosen) < k:
        nxt = int(np.argmax(closest))
        chosen.append(nxt)
        closest = np.minimum(closest, np.sum((values - values[nxt]) ** 2, axis=1))
    return values[chosen]


def init_responsibilities(
    embeddings: Embeddings,
    k_trunc: int,
    method: str = "soft-kmeans",
    temperature: float = 1.0,
    external: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Starting responsibilities for the unfolded EM.

    The result is a constant with respect to the embeddings, even when they
    are recorded on a tape.

    Args:
        embeddings: N x C embeddings, N >= 1
        k_trunc: Number of columns K'
        method: "uniform", "soft-kmeans" or "external"
        temperature: Soft k-means temperature tau
        external: Caller-supplied N x K' matrix for method="external"

    Returns:
        np.ndarray: Row-stochastic N x K' matrix

    Raises:
        ResponsibilityValidationError: If the external matrix is not row-stochastic
    """
    values = np.asarray(value_of(_matrix(embeddings)), dtype=np.float64)
    if values.ndim != 2 or values.shape[0] < 1:
        raise ShapeMismatchError("initialization needs at least one embedding")
    if k_trunc < 1:
        raise ValueError("k_trunc must be at least 1")
    n = values.shape[0]

    if method == "uniform":
        return np.full((n, k_trunc), 1.0 / k_trunc)

    if method == "soft-kmeans":
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        centers = _farthest_point_centers(values, k_trunc)
        sq = np.sum((values[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        return F.normalize_log_probs(-sq / temperature)

    if method == "external":
        if external is None:
            raise ResponsibilityValidationError("external initialization needs a matrix")
        matrix = np.asarray(value_of(external), dtype=np.float64)
        if matrix.shape != (n, k_trunc):
            raise ResponsibilityValidationError(
                f"external matrix has shape {matrix.shape}, expected {(n, k_trunc)}"
            )
        is_valid, error = validate_row_stochastic(matrix)
        if not is_valid:
            raise ResponsibilityValidationError(error)
        return matrix

    raise ValueError(f"unknown init method: {method} (expected one of {INIT_METHODS})")


def _squared_distances(matrix, theta):
    n, c = np.shape(value_of(matrix))
    k = np.shape(value_of(theta))[0]
    diff = F.sub(F.reshape(matrix, (n, 1, c)), F.reshape(theta, (1, k, c)))
    return F.sqnorm(diff, axis=2)


def vb_m_step(R, embeddings: Embeddings, prev: VariationalParams, hyper: IgmmHyper) -> VariationalParams:
    """
    VB M-step.

    Order: gamma1, gamma2, then a from R, then theta weighted by the
    expected precision a / b (new a, previous b), then b using the new theta.
    """
    matrix = _matrix(embeddings)
    dim = _check_dim(matrix, hyper)
    k = np.shape(value_of(R))[1]
    if k != hyper.k_trunc:
        raise ShapeMismatchError(f"responsibilities have {k} columns, expected {hyper.k_trunc}")

    mass = F.sum(R, axis=0)
    gamma1 = F.add(1.0, mass)
    gamma2 = F.add(hyper.alpha, F.matmul(strictly_upper_ones(k), mass))
    a = F.add(1.0, F.mul(0.5 * dim, mass))

    ratio = F.div(a, prev.b)
    weighted = F.matmul(F.transpose(R), matrix)
    numer = F.mul(F.reshape(ratio, (k, 1)), weighted)
    denom = F.add(1.0, F.mul(ratio, mass))
    theta = F.div(numer, F.reshape(denom, (k, 1)))

    spread = F.add(_squared_distances(matrix, theta), float(dim))
    b = F.add(1.0, F.mul(0.5, F.sum(F.mul(R, spread), axis=0)))
    return VariationalParams(gamma1=gamma1, gamma2=gamma2, theta=theta, a=a, b=b)


def vb_e_step(params: VariationalParams, embeddings: Embeddings, hyper: IgmmHyper):
    """VB E-step; returns the N x K' responsibilities."""
    matrix = _matrix(embeddings)
    dim = _check_dim(matrix, hyper)
    k = np.shape(value_of(params.gamma1))[0]

    log_stick = F.sub(F.digamma(params.gamma1), F.digamma(F.add(params.gamma1, params.gamma2)))
    log_rest = F.sub(F.digamma(params.gamma2), F.digamma(F.add(params.gamma1, params.gamma2)))
    order = strictly_upper_ones(k)
    if hyper.stick_prior == "preceding":
        order = order.T
    stick = F.add(log_stick, F.matmul(order, log_rest))

    precision_term = F.mul(0.5 * dim, F.sub(F.digamma(params.a), F.log(params.b)))
    per_cluster = F.add(stick, precision_term)

    scale = F.div(params.a, F.mul(2.0, params.b))
    spread = F.add(_squared_distances(matrix, params.theta), float(dim))
    logits = F.sub(per_cluster, F.mul(scale, spread))
    return F.normalize_log_probs(logits)


def run_unfolded(
    embeddings: Embeddings,
    hyper: IgmmHyper,
    init,
    differentiable: bool = False,
    monitor: Optional[List[float]] = None,
):
    """
    Run em_iters (M-step, E-step) pairs from `init`.

    Args:
        embeddings: N x C embeddings (EmbeddingSet, array or Tensor)
        hyper: iGMM hyperparameters
        init: Row-stochastic N x K' starting responsibilities
        differentiable: Record on a tape; plain arrays are wrapped on a new one
        monitor: If given, receives ||R_t - R_{t-1}||_inf per iteration

    Returns:
        Final responsibilities (a Tensor when differentiable)
    """
    matrix = _matrix(embeddings)
    _check_dim(matrix, hyper)
    n = np.shape(value_of(matrix))[0]

    init_values = np.asarray(value_of(init), dtype=np.float64)
    if init_values.shape != (n, hyper.k_trunc):
        raise ShapeMismatchError(
            f"init has shape {init_values.shape}, expected {(n, hyper.k_trunc)}"
        )
    is_valid, error = validate_row_stochastic(init_values)
    if not is_valid:
        raise ResponsibilityValidationError(error)

    if differentiable:
        if not is_recorded(matrix):
            matrix = Tape().variable(matrix, name="embeddings")
        R = init
    else:
        matrix = np.asarray(value_of(matrix), dtype=np.float64)
        R = init_values

    if hyper.em_iters == 0:
        return R

    prev = VariationalParams.initial(hyper.k_trunc, hyper.dim, hyper.alpha)
    for iteration in range(1, hyper.em_iters + 1):
        params = vb_m_step(R, matrix, prev, hyper)
        updated = vb_e_step(params, matrix, hyper)
        delta = float(np.max(np.abs(value_of(updated) - value_of(R)))) if n else 0.0
        logger.debug(f"EM iteration {iteration}/{hyper.em_iters}: max responsibility change {delta:.3e}")
        if monitor is not None:
            monitor.append(delta)
        prev, R = params, updated
    return R


def hard_assign(R) -> np.ndarray:
    """Argmax cluster per row; ties go to the lowest index."""
    return np.argmax(np.asarray(value_of(R)), axis=1).astype(np.int64)


def effective_cluster_count(R, mass_threshold: float = 0.5) -> int:
    """Number of clusters whose total responsibility reaches `mass_threshold`."""
    if mass_threshold <= 0:
        raise ValueError("mass_threshold must be positive")
    mass = np.sum(np.asarray(value_of(R)), axis=0)
    return int(np.count_nonzero(mass >= mass_threshold))
