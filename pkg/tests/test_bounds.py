"""Coupon-collection samplers and the certified lower bounds they feed."""

import math

import numpy as np
import pytest
from scipy import stats

from mixlab import LABELED, ModelParams, replica_stream
from mixlab.bounds import (
    CollectorSpec,
    collection_time_samples,
    collector_moments,
    geometric_sum_samples,
    labeled_tv_lower_bound,
    simulate_collection_time,
    single_draw_collection_samples,
    unlabeled_tv_lower_bound,
)
from mixlab.exclusion import brute_force_tv_curve
from mixlab.lumped import d_curve, equilibrium


def test_collector_moments_frozen():
    mean, var = collector_moments(CollectorSpec(4, 2))
    assert mean == 6.0
    assert var == pytest.approx(14.0, abs=1e-12)
    # straight from the geometric decomposition, recomputed by hand
    assert mean == sum(4.0 / j for j in (1, 2))
    assert var == pytest.approx(sum((1 - j / 4) / (j / 4) ** 2 for j in (1, 2)), abs=1e-12)


def test_collector_spec_validation():
    with pytest.raises(ValueError):
        CollectorSpec(4, 0)
    with pytest.raises(ValueError):
        CollectorSpec(4, 5)
    with pytest.raises(ValueError):
        CollectorSpec(4, 2, 2)
    with pytest.raises(ValueError):
        CollectorSpec(4, 2, -1)
    CollectorSpec(4, 2, 1)


def test_raw_draws_agree_with_geometric_resampling():
    """The two tau' samplers share no code; their laws must coincide."""
    spec = CollectorSpec(50, 10)
    raw = single_draw_collection_samples(spec, 20_000, replica_stream(41, 0))
    alt = geometric_sum_samples(spec, 20_000, replica_stream(41, 1))
    assert stats.ks_2samp(raw, alt).pvalue > 0.01
    mean, var = collector_moments(spec)
    assert abs(raw.mean() - mean) < 4.0 * math.sqrt(var / raw.size)
    assert abs(alt.mean() - mean) < 4.0 * math.sqrt(var / alt.size)
    assert raw.min() >= spec.k - spec.residual


def test_residual_shortens_collection():
    full = collector_moments(CollectorSpec(50, 10))[0]
    short = collector_moments(CollectorSpec(50, 10, 4))[0]
    assert short < full


def test_chain_steps_halve_the_draw_count():
    spec = CollectorSpec(30, 6)
    steps = collection_time_samples(spec, 10_000, replica_stream(41, 2))
    halved = (single_draw_collection_samples(spec, 10_000, replica_stream(41, 3)) + 1) // 2
    assert stats.ks_2samp(steps, halved).pvalue > 0.01
    assert steps.min() >= (6 + 1) // 2  # at most two fresh sites per chain step


def test_block_size_does_not_change_the_law():
    spec = CollectorSpec(12, 6)
    a = single_draw_collection_samples(spec, 4000, replica_stream(41, 4), block=3)
    b = single_draw_collection_samples(spec, 4000, replica_stream(41, 5), block=512)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_sampler_determinism_and_single_draw():
    spec = CollectorSpec(20, 5)
    a = single_draw_collection_samples(spec, 300, replica_stream(41, 6))
    b = single_draw_collection_samples(spec, 300, replica_stream(41, 6))
    np.testing.assert_array_equal(a, b)
    value = simulate_collection_time(spec, replica_stream(41, 7))
    assert value >= 3
    with pytest.raises(ValueError):
        single_draw_collection_samples(spec, 0, replica_stream(41, 8))
    with pytest.raises(ValueError):
        geometric_sum_samples(spec, 0, replica_stream(41, 9))


def test_unlabeled_bound_fields():
    params = ModelParams(30, 6)
    pi0 = float(equilibrium(params)[0])
    bound = unlabeled_tv_lower_bound(params, 3, replicas=500, rng=replica_stream(41, 10))
    assert bound.t == 3
    assert bound.correction == pytest.approx(1.0 - pi0, abs=1e-15)
    assert 0.0 <= bound.survival <= 1.0
    assert 0.0 <= bound.value <= 1.0
    assert 0.0 <= bound.chebyshev <= 1.0
    with pytest.raises(ValueError):
        unlabeled_tv_lower_bound(params, -1, replicas=10, rng=replica_stream(41, 11))


def test_unlabeled_bound_below_exact_distance():
    """Simulated and Chebyshev certificates both stay under the true curve."""
    params = ModelParams(30, 6)
    curve = d_curve(params, 130).tv
    for t in (1, 5, 15, 40, 120):
        bound = unlabeled_tv_lower_bound(
            params, t, replicas=20_000, rng=replica_stream(41, 100 + t)
        )
        assert bound.value <= curve[t] + 1e-12
        assert bound.chebyshev <= curve[t] + 1e-12


def test_labeled_bound_fields_and_early_out():
    params = ModelParams(100, 20)
    # 5 steps cannot select the 15 needed block sites: survival is exactly 1
    bound = labeled_tv_lower_bound(params, 5, 5, replicas=100, rng=replica_stream(41, 12))
    assert bound.survival == 1.0 and bound.stderr == 0.0
    assert bound.correction == pytest.approx(0.2, abs=1e-15)
    assert bound.value == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ValueError):
        labeled_tv_lower_bound(params, 5, 0, replicas=100, rng=replica_stream(41, 13))
    with pytest.raises(ValueError):
        labeled_tv_lower_bound(params, 5, 20, replicas=100, rng=replica_stream(41, 14))
    with pytest.raises(ValueError):
        labeled_tv_lower_bound(params, -1, 5, replicas=100, rng=replica_stream(41, 15))


def test_labeled_bound_below_brute_force_distance():
    params = ModelParams(6, 3)
    curve = brute_force_tv_curve(params, LABELED, 25)
    for t in (0, 1, 2, 5, 10, 20):
        bound = labeled_tv_lower_bound(
            params, t, 2, replicas=20_000, rng=replica_stream(41, 200 + t)
        )
        assert bound.value <= curve[t] + 1e-12
        assert bound.chebyshev <= curve[t] + 1e-12


def test_chebyshev_certificate_is_conservative():
    """The closed-form survival floor never exceeds the simulated survival."""
    params = ModelParams(200, 40)
    for t in (5, 20, 60):
        bound = unlabeled_tv_lower_bound(
            params, t, replicas=40_000, rng=replica_stream(41, 300 + t)
        )
        cheb_survival = bound.chebyshev + bound.correction if bound.chebyshev > 0 else 0.0
        assert cheb_survival <= bound.survival + 4.0 * max(bound.stderr, 1e-4)
