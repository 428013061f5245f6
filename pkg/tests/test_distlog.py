import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decompound.charfun import ComplexSeries, FrequencyGrid, deconvolve_gaussian, ecf, true_cf_X
from decompound.distlog import (
    DistLogStatus,
    JumpSuspect,
    Vanished,
    check_nonvanishing,
    unwrap_log,
)
from decompound.processes import ModelSpec, laplace_jumps, normal_jumps, simulate_observations


def psi_series(grid, values):
    return ComplexSeries(grid, values, "psi")


@pytest.mark.invariant
def test_unit_circle_is_linear_phase():
    g = FrequencyGrid(0.01, 2001)
    ul = unwrap_log(psi_series(g, np.exp(1j * g.points)))
    assert ul.status.ok
    assert np.max(np.abs(ul.log_values - 1j * g.points)) < 1e-9
    assert ul.log_values[-1].imag == pytest.approx(20.0, abs=1e-12)
    # the principal branch is off by 6 pi at t=20
    assert np.angle(np.exp(20j)) == pytest.approx(20 - 6 * math.pi)
    assert ul.n_corrections == 3
    assert ul.corrections[-1] == 3


def test_constant_real_series():
    g = FrequencyGrid(0.1, 100)
    ul = unwrap_log(psi_series(g, np.full(100, 2.5)))
    assert np.all(ul.log_values.imag == 0)
    assert np.allclose(ul.log_values.real, math.log(2.5), atol=0, rtol=1e-15)


def test_small_intensity_matches_principal_log():
    g = FrequencyGrid(2**-9, int(20 * 2**9) + 1)
    psi = deconvolve_gaussian(true_cf_X(0.5, normal_jumps(), g), 0.5)
    ul = unwrap_log(psi)
    assert ul.n_corrections == 0
    assert np.array_equal(ul.log_values.imag, np.angle(psi.values) * (np.arange(g.count) > 0))
    assert np.allclose(ul.log_values, np.log(psi.values), rtol=1e-14, atol=1e-15)


def test_anchor_and_base_value():
    g = FrequencyGrid(2**-9, 1025)
    lam = 1.3
    ul = unwrap_log(deconvolve_gaussian(true_cf_X(lam, laplace_jumps(), g), lam))
    assert ul.log_values[0].imag == 0
    assert ul.base_value == pytest.approx(lam, abs=1e-15)


@pytest.mark.invariant
@given(
    slope=st.floats(-40, 40),
    curve=st.floats(-5, 5),
    amp=st.floats(-3, 3),
)
def test_round_trip_and_continuity(slope, curve, amp):
    g = FrequencyGrid(0.01, 1001)
    t = g.points
    log_true = amp * np.sin(t) * t / 10 + 1j * (slope * t + curve * t**2 / 10)
    psi = psi_series(g, np.exp(log_true))
    ul = unwrap_log(psi)
    assert ul.status.ok
    assert np.max(np.abs(ul.log_values - log_true)) < 1e-9
    assert np.all(np.abs(np.diff(ul.log_values.imag)) < math.pi)
    rel = np.abs(np.exp(ul.log_values) - psi.values) / np.abs(psi.values)
    assert rel.max() < 1e-12


@pytest.mark.invariant
def test_hermitian_mirror():
    obs = simulate_observations(ModelSpec(1.0, normal_jumps(), 3000), 5)
    g = FrequencyGrid(2**-9, 1025)
    ul = unwrap_log(deconvolve_gaussian(ecf(obs, g), 1.0))
    full = ul.mirrored()
    m = g.count - 1
    assert np.array_equal(full[:m][::-1], np.conj(full[m + 1:]))
    assert full.shape == g.full_points.shape


@pytest.mark.invariant
def test_grid_refinement_is_stable():
    coarse = FrequencyGrid(0.02, 751)
    fine = FrequencyGrid(0.01, 1501)

    def log_of(g):
        t = g.points
        return unwrap_log(psi_series(g, np.exp(0.3 * np.cos(t) + 1j * (2 * t + np.sin(3 * t)))))

    a = log_of(coarse).log_values
    b = log_of(fine).log_values[::2]
    assert np.max(np.abs(a - b)) < 1e-9


def test_exact_zero_vanishes():
    g = FrequencyGrid(0.1, 10)
    v = np.ones(10, dtype=complex)
    v[6] = 0
    status, mn = check_nonvanishing(psi_series(g, v))
    assert status == DistLogStatus("vanished", 6)
    assert mn == 0
    ul = unwrap_log(psi_series(g, v))
    assert ul.status.state == "vanished" and ul.status.index == 6
    assert np.all(ul.log_values[6:] == 0)
    with pytest.raises(Vanished):
        ul.raise_for_status()


@pytest.mark.parametrize("lam", [0.1, 1.0, 4.0])
def test_true_psi_never_vanishes(lam):
    g = FrequencyGrid(2**-9, 2049)
    status, mn = check_nonvanishing(deconvolve_gaussian(true_cf_X(lam, laplace_jumps(), g), lam))
    assert status.ok
    assert mn >= math.exp(-2 * lam)


def test_coarse_step_is_flagged():
    g = FrequencyGrid(1.0, 10)
    # phase advancing by 0.95 pi per step cannot be resolved at threshold 0.9 pi
    ul = unwrap_log(psi_series(g, np.exp(0.95j * math.pi * g.points)))
    assert ul.status == DistLogStatus("jump_suspect", 1)
    with pytest.raises(JumpSuspect):
        ul.raise_for_status()


def test_input_validation():
    g = FrequencyGrid(0.1, 3)
    with pytest.raises(ValueError):
        unwrap_log(ComplexSeries(g, [1, 1, 1], "ecf"))
    with pytest.raises(ValueError):
        unwrap_log(psi_series(g, [-1, 1, 1]))
    with pytest.raises(ValueError):
        unwrap_log(psi_series(g, [1, 1, 1]), jump_threshold=4.0)
