import math

import mpmath
import numpy as np
import pytest

from decompound.estimator import EstimatorConfig, estimate_density
from decompound.experiments import (
    FIGURE_SEED,
    TooManyVanished,
    bias_study,
    mc_normality,
    nonincreasing_within,
    replicate_seeds,
    reproduce_figure,
    target_variance,
    vanishing_frequency,
    zeta,
)
from decompound.processes import ModelSpec, laplace_jumps, normal_jumps, simulate_observations

H_VALUES = [0.4, 0.5, 0.6, 0.7, 0.8]


def test_target_variance_value():
    oracle = mpmath.e**2 / (2 * mpmath.pi**2)
    assert target_variance(1.0) == pytest.approx(float(oracle), rel=1e-15)
    assert abs(target_variance(1.0) - 0.3744) < 1e-4


def test_zeta_value():
    oracle = mpmath.sqrt(5000) * 2 * mpmath.exp(-2)
    assert zeta(5000, 0.5) == pytest.approx(float(oracle), rel=1e-14)
    assert abs(zeta(5000, 0.5) - 19.14) < 0.01


def test_replicate_seeds_deterministic():
    assert replicate_seeds(3, 5) == replicate_seeds(3, 5)
    assert len(set(replicate_seeds(3, 100))) == 100


@pytest.fixture(scope="module")
def small_report():
    spec = ModelSpec(1.0, normal_jumps(), 500)
    return mc_normality(spec, EstimatorConfig(h=0.6), 0.0, 60, seed=4)


@pytest.mark.invariant
def test_normality_report_shape(small_report):
    r = small_report
    assert r.vanished_count == 0
    assert r.stats.shape == (60,)
    assert abs(r.stats.mean()) < 1e-12
    assert r.zeta == pytest.approx(zeta(500, 0.6))
    # moment skewness and quantile skewness from independent code paths
    if abs(r.skewness) > 0.2:
        assert np.sign(r.skewness) == np.sign(r.quantile_skewness)


@pytest.mark.invariant
def test_normality_replicates_are_independent(small_report):
    spec = ModelSpec(1.0, normal_jumps(), 500)
    cfg = EstimatorConfig(h=0.6, x_grid=[0.0])
    for i in (0, 17, 59):
        obs = simulate_observations(spec, small_report.seeds[i])
        assert estimate_density(obs, 1.0, cfg).f_hat[0] == small_report.estimates[i]


@pytest.mark.invariant
def test_normality_is_deterministic_and_job_independent(small_report):
    spec = ModelSpec(1.0, normal_jumps(), 500)
    again = mc_normality(spec, EstimatorConfig(h=0.6), 0.0, 60, seed=4, jobs=2)
    assert again.estimates.tobytes() == small_report.estimates.tobytes()
    assert again.stats.tobytes() == small_report.stats.tobytes()


def test_too_many_vanished():
    spec = ModelSpec(1.0, normal_jumps(), 200)
    with pytest.raises(TooManyVanished):
        mc_normality(spec, EstimatorConfig(h=0.6, modulus_floor=1e6), 0.0, 50, seed=1)


def test_normality_needs_reps():
    with pytest.raises(ValueError):
        mc_normality(ModelSpec(1.0, normal_jumps(), 100), EstimatorConfig(h=0.6), 0.0, 10, 0)


def test_vanishing_oracle_is_zero():
    t = vanishing_frequency(1.0, normal_jumps(), [50, 500], EstimatorConfig(h=0.3), 100, 0,
                            oracle=True)
    assert t.fractions == [0.0, 0.0]


def test_vanishing_harness_total_at_tiny_bandwidth():
    t = vanishing_frequency(1.0, normal_jumps(), [50], EstimatorConfig(h=0.1), 100, 0)
    assert len(t.fractions) == 1 and 0.0 <= t.fractions[0] <= 1.0


def test_vanishing_with_large_floor_counts_everything():
    t = vanishing_frequency(1.0, normal_jumps(), [50], EstimatorConfig(h=0.5, modulus_floor=1e9),
                            100, 0)
    assert t.fractions == [1.0]


def test_nonincreasing_within():
    assert nonincreasing_within([0.5, 0.3, 0.1], 200)
    assert nonincreasing_within([0.0, 0.0, 0.0], 200)
    # a small bump is tolerated once
    assert nonincreasing_within([0.30, 0.32, 0.1], 200)
    assert not nonincreasing_within([0.30, 0.32, 0.34], 200)
    assert not nonincreasing_within([0.1, 0.5, 0.2], 200)


@pytest.mark.parametrize("law", [normal_jumps(), laplace_jumps()])
def test_bias_rate_shape(law):
    rep = bias_study(law, 1.0, 0.0, H_VALUES)
    assert np.all(rep.bias < 0)
    assert rep.ratio_spread < 10


def test_bias_vanishes_with_bandwidth():
    rep = bias_study(normal_jumps(), 1.0, 0.0, [0.3, 0.8])
    assert abs(rep.bias[0]) < abs(rep.bias[1])


def test_bias_study_validation():
    with pytest.raises(ValueError):
        bias_study(normal_jumps(), 1.0, 0.0, [0.5, 0.4])


def test_reproduce_figure():
    fig = reproduce_figure()
    assert fig.seed == FIGURE_SEED
    assert fig.x.shape == (401,)
    assert fig.x[0] == -4 and fig.x[-1] == 4 and fig.x[200] == 0
    assert fig.f_true[200] == pytest.approx(0.39894, abs=1e-5)
    assert fig.estimate.distlog_status.ok
    assert fig.mean_abs_error() < 0.05
