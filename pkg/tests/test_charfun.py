import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from decompound.charfun import (
    ComplexSeries,
    FrequencyGrid,
    GridBeyondCutoff,
    deconvolve_gaussian,
    ecf,
    ecf_values,
    true_cf_X,
    write_series_csv,
)
from decompound.processes import ModelSpec, laplace_jumps, normal_jumps, simulate_observations

samples = arrays(np.float64, st.integers(1, 40), elements=st.floats(-50, 50, allow_subnormal=False))


def test_grid_layout():
    g = FrequencyGrid(0.25, 5)
    assert g.points.tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    assert g.full_points.tolist() == [-1.0, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1.0]
    c = FrequencyGrid.covering(10 / 3, 2**-9)
    assert c.t_max == pytest.approx(10 / 3, abs=1e-15)
    assert c.eta <= 2**-9


def test_ecf_examples():
    g = FrequencyGrid(math.pi / 4, 2)
    v = ecf(np.array([2.0]), g).values
    assert v[0] == 1
    assert abs(v[1] - 1j) < 1e-15
    t = np.linspace(0, 7, 30)
    assert np.allclose(ecf_values(np.array([1.0, -1.0]), t), np.cos(t), atol=1e-15)


@pytest.mark.invariant
@given(samples)
def test_ecf_bounded_and_anchored(x):
    s = ecf(x, FrequencyGrid(0.1, 50))
    assert s.values[0] == 1
    assert np.all(np.abs(s.values) <= 1 + 1e-12)


@pytest.mark.invariant
@given(samples)
def test_ecf_full_grid_is_reflection(x):
    g = FrequencyGrid(0.05, 64)
    direct = ecf_values(x, g.full_points)
    reflected = ComplexSeries(g, ecf_values(x, g.points), "ecf").mirrored()
    assert np.array_equal(direct, reflected)


def test_true_cf_value_at_one():
    g = FrequencyGrid(1.0, 2)
    v = true_cf_X(1.0, normal_jumps(), g).values
    oracle = mpmath.exp(-1 + mpmath.exp(-0.5)) * mpmath.exp(-0.5)
    assert v[0] == 1
    assert abs(v[1] - complex(oracle)) < 1e-15
    assert abs(v[1] - 0.4093) < 1e-4


@pytest.mark.parametrize("lam", [0.2, 1.0, 3.0])
@pytest.mark.parametrize("law", [normal_jumps(), laplace_jumps()])
def test_true_cf_lower_bound(lam, law):
    g = FrequencyGrid(0.01, 1001)
    v = true_cf_X(lam, law, g).values
    t = g.points
    assert np.all(np.abs(v) >= math.exp(-2 * lam) * np.exp(-0.5 * t**2) * (1 - 1e-12))


def test_deconvolve_recovers_exp_lambda_cf():
    g = FrequencyGrid(2**-9, 1025)
    psi = deconvolve_gaussian(true_cf_X(1.0, normal_jumps(), g), 1.0)
    assert psi.kind == "psi"
    assert psi.values[0] == math.e
    expected = np.exp(np.exp(-0.5 * g.points**2))
    assert np.max(np.abs(psi.values - expected)) < 1e-12


@pytest.mark.invariant
def test_deconvolve_preserves_hermitian_symmetry():
    obs = simulate_observations(ModelSpec(1.0, laplace_jumps(), 200), 3)
    g = FrequencyGrid(0.01, 200)
    psi = deconvolve_gaussian(ecf(obs, g), 1.0)
    full_x = ComplexSeries(FrequencyGrid(0.01, 200), ecf_values(obs.values, -g.points), "ecf")
    neg = deconvolve_gaussian(full_x, 1.0)
    assert np.array_equal(neg.values, np.conj(psi.values))


def test_deconvolve_guards():
    with pytest.raises(GridBeyondCutoff):
        deconvolve_gaussian(ComplexSeries(FrequencyGrid(1.0, 40), np.ones(40), "ecf"), 1.0)
    with pytest.raises(ValueError):
        deconvolve_gaussian(ComplexSeries(FrequencyGrid(1.0, 2), np.ones(2), "psi"), 1.0)


@pytest.mark.invariant
def test_ecf_concentration_envelope():
    n = 100_000
    obs = simulate_observations(ModelSpec(1.0, normal_jumps(), n), 99)
    g = FrequencyGrid(2**-7, 257)
    gap = np.abs(ecf(obs, g).values - true_cf_X(1.0, normal_jumps(), g).values)
    assert gap.max() < 5 * math.log(n) / math.sqrt(n)


def test_series_csv(tmp_path):
    import io

    s = ComplexSeries(FrequencyGrid(0.5, 3), [1, 1j, -1], "ecf")
    buf = io.StringIO()
    write_series_csv(s, buf)
    lines = buf.getvalue().splitlines()
    assert lines[:2] == ["# kind=ecf", "t,re,im"]
    assert len(lines) == 5
