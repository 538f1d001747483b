"""
Generative sampling, initialization, VB steps and the unfolded EM run.
"""

import math

import numpy as np
import pytest

from conftest import planted_sample, random_responsibilities
from diarclust.autodiff import check_gradient, numerical_gradient, ops as F, tape_gradients
from diarclust.exceptions import ResponsibilityValidationError, ShapeMismatchError
from diarclust.igmm import (
    effective_cluster_count,
    hard_assign,
    init_responsibilities,
    run_unfolded,
    sample_generative,
    vb_e_step,
    vb_m_step,
)
from diarclust.losses import cluster_loss, exact_ari
from diarclust.models import EmbeddingSet, VariationalParams
from diarclust.numerics import digamma
from diarclust.schemas.hyper import IgmmHyper
from diarclust.utils.helpers import make_rng


def _random_params(rng, k, dim, alpha):
    return VariationalParams(
        gamma1=1.0 + rng.uniform(0.0, 5.0, k),
        gamma2=alpha + rng.uniform(0.0, 5.0, k),
        theta=rng.standard_normal((k, dim)),
        a=1.0 + rng.uniform(0.0, 10.0, k),
        b=1.0 + rng.uniform(0.0, 10.0, k),
    )


def _m_step_loops(R, E, prev, alpha):
    """Straight-line evaluation of the M-step, one cluster at a time."""
    n, k = R.shape
    c = E.shape[1]
    out = {name: [] for name in ("gamma1", "gamma2", "theta", "a", "b")}
    for j in range(k):
        mass = sum(R[i, j] for i in range(n))
        following = sum(R[i, jj] for i in range(n) for jj in range(j + 1, k))
        a = 1.0 + 0.5 * c * mass
        ratio = a / prev.b[j]
        weighted = sum(R[i, j] * E[i] for i in range(n))
        theta = ratio * weighted / (1.0 + ratio * mass)
        b = 1.0 + 0.5 * sum(R[i, j] * (np.sum((E[i] - theta) ** 2) + c) for i in range(n))
        out["gamma1"].append(1.0 + mass)
        out["gamma2"].append(alpha + following)
        out["theta"].append(theta)
        out["a"].append(a)
        out["b"].append(b)
    return {name: np.array(values) for name, values in out.items()}


def _e_step_loops(params, E, stick_prior="following"):
    n, c = E.shape
    k = len(params.gamma1)
    R = np.zeros((n, k))
    for i in range(n):
        logits = []
        for j in range(k):
            total = params.gamma1[j] + params.gamma2[j]
            value = digamma(params.gamma1[j]) - digamma(total)
            others = range(j + 1, k) if stick_prior == "following" else range(j)
            for jj in others:
                value += digamma(params.gamma2[jj]) - digamma(params.gamma1[jj] + params.gamma2[jj])
            value += 0.5 * c * (digamma(params.a[j]) - math.log(params.b[j]))
            dist = np.sum((E[i] - params.theta[j]) ** 2)
            value -= params.a[j] / (2.0 * params.b[j]) * (dist + c)
            logits.append(value)
        top = max(logits)
        weights = [math.exp(v - top) for v in logits]
        R[i] = np.array(weights) / sum(weights)
    return R


def test_sample_generative_is_deterministic():
    hyper = IgmmHyper(alpha=1.0, k_trunc=10, dim=16)
    first = sample_generative(hyper, 50, seed=3)
    second = sample_generative(hyper, 50, seed=3)
    np.testing.assert_array_equal(first.embeddings, second.embeddings)
    np.testing.assert_array_equal(first.assignments, second.assignments)
    assert first.embeddings.shape == (50, 16)
    assert first.assignments.min() >= 0 and first.assignments.max() < 10


def test_sample_generative_empty_and_negative():
    hyper = IgmmHyper(dim=4)
    sample = sample_generative(hyper, 0, seed=1)
    assert sample.n == 0
    assert sample.embeddings.shape == (0, 4)
    with pytest.raises(ValueError):
        sample_generative(hyper, -1, seed=1)


def test_tiny_alpha_puts_everything_in_one_cluster():
    sample = sample_generative(IgmmHyper(alpha=1e-6, k_trunc=10, dim=4), 50, seed=5)
    assert len(set(sample.assignments.tolist())) == 1
    assert sample.weights[0] >= 1 - 1e-3


def test_planted_parameters_are_used():
    sample = planted_sample(seed=2)
    np.testing.assert_allclose(sample.weights, np.full(4, 0.25))
    assert np.linalg.norm(sample.means[0] - sample.means[1]) == pytest.approx(10.0)
    assert set(sample.assignments.tolist()) <= {0, 1, 2, 3}


def test_cluster_count_distribution_matches_stick_breaking_simulation():
    hyper = IgmmHyper(alpha=1.0, k_trunc=10, dim=16)
    n, seeds = 200, 300
    sampled = [len(np.unique(sample_generative(hyper, n, seed).assignments)) for seed in range(seeds)]

    rng = np.random.default_rng(2024)
    simulated = []
    for _ in range(seeds):
        sticks = rng.beta(1.0, 1.0, size=10)
        pi = np.array([sticks[k] * np.prod(1.0 - sticks[:k]) for k in range(10)])
        counts = rng.multinomial(n, pi / pi.sum())
        simulated.append(int(np.count_nonzero(counts)))

    a, b = np.array(sampled, float), np.array(simulated, float)
    sigma = math.sqrt(a.var() / seeds + b.var() / seeds)
    assert abs(a.mean() - b.mean()) <= 4 * sigma


def test_uniform_init():
    R = init_responsibilities(make_rng(0).standard_normal((7, 3)), 4, "uniform")
    np.testing.assert_array_equal(R, np.full((7, 4), 0.25))


def test_soft_kmeans_sharp_temperature_gives_permutation():
    points = 5.0 * np.eye(5)
    R = init_responsibilities(points, 5, "soft-kmeans", temperature=1e-6)
    assert np.all(R.max(axis=1) > 1 - 1e-6)
    assert sorted(R.argmax(axis=1).tolist()) == [0, 1, 2, 3, 4]


def test_soft_kmeans_is_deterministic_and_stochastic():
    E = make_rng(8).standard_normal((30, 8))
    first = init_responsibilities(E, 10, "soft-kmeans", temperature=1.0)
    second = init_responsibilities(E, 10, "soft-kmeans", temperature=1.0)
    np.testing.assert_array_equal(first, second)
    np.testing.assert_allclose(first.sum(axis=1), np.ones(30), atol=1e-12)


def test_external_init_validation(rng):
    E = rng.standard_normal((4, 2))
    good = random_responsibilities(rng, 4, 3)
    np.testing.assert_array_equal(init_responsibilities(E, 3, "external", external=good), good)
    bad = good.copy()
    bad[0, 0] += 0.1
    with pytest.raises(ResponsibilityValidationError):
        init_responsibilities(E, 3, "external", external=bad)
    with pytest.raises(ResponsibilityValidationError):
        init_responsibilities(E, 3, "external")
    with pytest.raises(ValueError):
        init_responsibilities(E, 3, "random")


def test_m_step_empty_cluster_fixed_point():
    hyper = IgmmHyper(alpha=2.0, k_trunc=2, dim=3)
    E = make_rng(1).standard_normal((4, 3))
    R = np.column_stack([np.ones(4), np.zeros(4)])
    params = vb_m_step(R, E, VariationalParams.initial(2, 3, 2.0), hyper)
    assert params.gamma1[1] == 1.0
    assert params.gamma2[1] == 2.0
    assert params.a[1] == 1.0
    assert params.b[1] == 1.0
    np.testing.assert_array_equal(params.theta[1], np.zeros(3))


def test_m_step_single_point_at_origin():
    c = 5
    hyper = IgmmHyper(alpha=1.0, k_trunc=1, dim=c)
    params = vb_m_step(np.ones((1, 1)), np.zeros((1, c)), VariationalParams.initial(1, c, 1.0), hyper)
    assert params.gamma1[0] == 2.0
    assert params.a[0] == 1 + c / 2
    assert params.b[0] == 1 + c / 2
    np.testing.assert_array_equal(params.theta, np.zeros((1, c)))


def test_m_step_matches_straight_line_evaluation():
    rng = make_rng(21)
    for _ in range(100):
        alpha = float(rng.uniform(0.1, 3.0))
        hyper = IgmmHyper(alpha=alpha, k_trunc=6, dim=4)
        E = rng.standard_normal((20, 4)) * 2.0
        R = random_responsibilities(rng, 20, 6)
        prev = _random_params(rng, 6, 4, alpha)
        got = vb_m_step(R, E, prev, hyper)
        expected = _m_step_loops(R, E, prev, alpha)
        for name, value in expected.items():
            np.testing.assert_allclose(getattr(got, name), value, rtol=1e-12, atol=1e-12, err_msg=name)


def test_m_step_keeps_parameter_invariants():
    rng = make_rng(22)
    hyper = IgmmHyper(alpha=0.7, k_trunc=5, dim=3)
    E = rng.standard_normal((15, 3))
    params = vb_m_step(random_responsibilities(rng, 15, 5), E, VariationalParams.initial(5, 3, 0.7), hyper)
    ok, error = params.check_invariants(0.7, max_norm=float(np.max(np.linalg.norm(E, axis=1))))
    assert ok, error


@pytest.mark.parametrize("stick_prior", ["following", "preceding"])
def test_e_step_matches_straight_line_evaluation(stick_prior):
    rng = make_rng(23)
    for _ in range(100):
        hyper = IgmmHyper(alpha=1.0, k_trunc=6, dim=4, stick_prior=stick_prior)
        E = rng.standard_normal((20, 4))
        params = _random_params(rng, 6, 4, 1.0)
        np.testing.assert_allclose(
            vb_e_step(params, E, hyper), _e_step_loops(params, E, stick_prior), rtol=1e-12, atol=1e-12
        )


def test_steps_reject_dimension_mismatch(rng):
    hyper = IgmmHyper(k_trunc=3, dim=4)
    E = rng.standard_normal((5, 3))
    with pytest.raises(ShapeMismatchError):
        vb_m_step(random_responsibilities(rng, 5, 3), E, VariationalParams.initial(3, 4, 1.0), hyper)
    with pytest.raises(ShapeMismatchError):
        vb_e_step(VariationalParams.initial(3, 4, 1.0), E, hyper)


def test_run_unfolded_rows_stay_stochastic(rng):
    hyper = IgmmHyper(k_trunc=5, em_iters=4, dim=3)
    E = rng.standard_normal((12, 3))
    monitor = []
    R = run_unfolded(E, hyper, random_responsibilities(rng, 12, 5), monitor=monitor)
    np.testing.assert_allclose(R.sum(axis=1), np.ones(12), atol=1e-12)
    assert np.all(R >= 0)
    assert len(monitor) == 4


def test_run_unfolded_zero_iterations_returns_init(rng):
    init = random_responsibilities(rng, 6, 3)
    R = run_unfolded(rng.standard_normal((6, 2)), IgmmHyper(k_trunc=3, em_iters=0, dim=2), init)
    np.testing.assert_array_equal(R, init)


def test_run_unfolded_accepts_embedding_set(rng):
    hyper = IgmmHyper(k_trunc=3, em_iters=2, dim=2)
    E = rng.standard_normal((6, 2))
    init = random_responsibilities(rng, 6, 3)
    np.testing.assert_array_equal(
        run_unfolded(EmbeddingSet.from_array(E), hyper, init), run_unfolded(E, hyper, init)
    )


def test_run_unfolded_rejects_bad_init(rng):
    hyper = IgmmHyper(k_trunc=3, em_iters=2, dim=2)
    E = rng.standard_normal((6, 2))
    with pytest.raises(ShapeMismatchError):
        run_unfolded(E, hyper, random_responsibilities(rng, 5, 3))
    bad = random_responsibilities(rng, 6, 3)
    bad[2] *= 2.0
    with pytest.raises(ResponsibilityValidationError):
        run_unfolded(E, hyper, bad)


def test_differentiable_run_equals_plain_run(rng):
    hyper = IgmmHyper(k_trunc=5, em_iters=10, dim=4)
    E = rng.standard_normal((20, 4))
    init = random_responsibilities(rng, 20, 5)
    plain = run_unfolded(E, hyper, init)
    recorded = run_unfolded(E, hyper, init, differentiable=True)
    assert np.array_equal(plain, recorded.value)


def test_cluster_loss_gradient_through_unfolded_em():
    rng = make_rng(31)
    hyper = IgmmHyper(alpha=1.0, k_trunc=5, em_iters=3, dim=4)
    E = rng.standard_normal((12, 4)) * 1.5
    init = random_responsibilities(rng, 12, 5)
    truth = [0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3]

    def loss(embeddings):
        return cluster_loss(run_unfolded(embeddings, hyper, init, differentiable=True), truth)

    _, (grad,) = tape_gradients(loss, [E])
    ok, error = check_gradient(grad, numerical_gradient(loss, E))
    assert ok, error


def test_m_step_gradient_matches_central_differences():
    rng = make_rng(32)
    hyper = IgmmHyper(alpha=1.5, k_trunc=3, dim=3)
    E = rng.standard_normal((7, 3))
    R = random_responsibilities(rng, 7, 3)
    prev = _random_params(rng, 3, 3, 1.5)
    w_theta = rng.standard_normal((3, 3))
    w_b = rng.uniform(0.5, 1.5, 3)

    def objective(resp, embeddings):
        params = vb_m_step(resp, embeddings, prev, hyper)
        parts = (
            F.sum(F.mul(params.theta, w_theta)),
            F.sum(F.mul(F.log(params.b), w_b)),
            F.sum(F.digamma(params.gamma2)),
            F.sum(F.log(params.a)),
        )
        return F.add(F.add(parts[0], parts[1]), F.add(parts[2], parts[3]))

    _, (grad_r, grad_e) = tape_gradients(objective, [R, E])
    ok, error = check_gradient(grad_r, numerical_gradient(lambda x: objective(x, E), R))
    assert ok, error
    ok, error = check_gradient(grad_e, numerical_gradient(lambda x: objective(R, x), E))
    assert ok, error


def test_e_step_gradient_matches_central_differences():
    rng = make_rng(33)
    hyper = IgmmHyper(alpha=1.0, k_trunc=4, dim=3)
    E = rng.standard_normal((6, 3))
    base = _random_params(rng, 4, 3, 1.0)
    weights = rng.standard_normal((6, 4))

    def objective(embeddings, theta, a, b):
        params = VariationalParams(gamma1=base.gamma1, gamma2=base.gamma2, theta=theta, a=a, b=b)
        return F.sum(F.mul(vb_e_step(params, embeddings, hyper), weights))

    inputs = [E, base.theta, base.a, base.b]
    _, grads = tape_gradients(objective, inputs)
    for position, grad in enumerate(grads):
        def partial(point, position=position):
            args = list(inputs)
            args[position] = point
            return objective(*args)

        ok, error = check_gradient(grad, numerical_gradient(partial, inputs[position]))
        assert ok, f"input {position}: {error}"


def test_run_unfolded_is_row_permutation_equivariant(rng):
    hyper = IgmmHyper(alpha=1.0, k_trunc=5, em_iters=6, dim=3)
    E = rng.standard_normal((15, 3)) * 2.0
    init = random_responsibilities(rng, 15, 5)
    perm = rng.permutation(15)
    R = run_unfolded(E, hyper, init)
    np.testing.assert_allclose(run_unfolded(E[perm], hyper, init[perm]), R[perm], rtol=1e-10, atol=1e-12)


def test_planted_responsibilities_settle_within_ten_iterations(planted, planted_hyper):
    init = init_responsibilities(planted.embeddings, planted_hyper.k_trunc, "soft-kmeans", 1.0)
    monitor = []
    run_unfolded(planted.embeddings, planted_hyper, init, monitor=monitor)
    assert len(monitor) == 10
    assert min(monitor) < 1e-3


def test_m_step_centers_sit_near_cluster_means(planted):
    """One step from the true assignments puts each center close to its empirical mean."""
    hyper = IgmmHyper(alpha=1.0, k_trunc=4, dim=16)
    R = np.eye(4)[planted.assignments]
    params = vb_m_step(R, planted.embeddings, VariationalParams.initial(4, 16, 1.0), hyper)
    for k in range(4):
        members = planted.embeddings[planted.assignments == k]
        assert np.linalg.norm(params.theta[k] - members.mean(axis=0)) < 0.1 * np.linalg.norm(members.mean(axis=0))


def test_planted_clusters_are_recovered():
    """Four separated clusters at K'=10: truth and the cluster count are recovered on almost every seed."""
    hyper = IgmmHyper(alpha=1.0, k_trunc=10, em_iters=10, dim=16)
    recovered = 0
    for seed in range(20):
        sample = planted_sample(seed)
        init = init_responsibilities(sample.embeddings, hyper.k_trunc, "soft-kmeans", 1.0)
        R = run_unfolded(sample.embeddings, hyper, init)
        if exact_ari(hard_assign(R), sample.assignments) >= 0.95 and effective_cluster_count(R) == 4:
            recovered += 1
    assert recovered >= 18


def test_planted_cluster_count_at_matching_truncation(planted):
    hyper = IgmmHyper(alpha=1.0, k_trunc=4, em_iters=10, dim=16)
    init = init_responsibilities(planted.embeddings, 4, "soft-kmeans", 1.0)
    R = run_unfolded(planted.embeddings, hyper, init)
    assert effective_cluster_count(R, 0.5) == 4
    assert exact_ari(hard_assign(R), planted.assignments) == pytest.approx(1.0)


def test_hard_assign_matches_scan(rng):
    R = random_responsibilities(rng, 25, 6)
    labels = hard_assign(R)
    for n in range(25):
        best = 0
        for k in range(1, 6):
            if R[n, k] > R[n, best]:
                best = k
        assert labels[n] == best


def test_hard_assign_ties_go_to_lowest_index():
    assert hard_assign(np.array([[0.5, 0.5], [0.25, 0.75]])).tolist() == [0, 1]


def test_effective_cluster_count():
    R = np.array([[0.9, 0.1, 0.0], [0.8, 0.1, 0.1], [0.1, 0.2, 0.7]])
    assert effective_cluster_count(R, 0.5) == 2
    assert effective_cluster_count(R, 0.3) == 3
    with pytest.raises(ValueError):
        effective_cluster_count(R, 0.0)
