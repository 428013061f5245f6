"""Fourier-inversion estimator of the jump density under Gaussian noise.

The estimate at ``x`` is

    f_nh(x) = 1/(2 pi lam) * int_{-1/h}^{1/h} exp(-i t x) Log psi(t) dt,
    psi(t) = ecf(t) * exp(lam + t^2/2),

with ``Log`` the distinguished logarithm and the sinc kernel acting as the
hard cutoff ``|t| <= 1/h``.  The integral is a trapezoid sum on a uniform
half-line grid; the negative half enters through Hermitian symmetry.  The
result is clamped to ``[-M_n, M_n]``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .charfun import FrequencyGrid, deconvolve_gaussian, ecf, true_cf_X
from .distlog import JUMP_THRESHOLD, MODULUS_FLOOR, DistLogStatus, unwrap_log

__all__ = [
    "EstimatorConfig",
    "DensityEstimate",
    "GridTooCoarse",
    "default_bandwidth",
    "frequency_grid",
    "fft_x_grid",
    "invert_log",
    "estimate_density",
    "oracle_mean_estimate",
    "DEFAULT_C_H",
]

# calibrated so that default_bandwidth(5000) == 0.5 at beta = 0.45
DEFAULT_C_H = 0.5 * math.log(5000.0) ** 0.45


class GridTooCoarse(RuntimeError):
    """Phase tracking hit an ambiguous increment; the frequency step is too large."""

    def __init__(self, index, message):
        super().__init__(message)
        self.index = index


def default_bandwidth(n, beta=0.45, c_h=DEFAULT_C_H):
    """Bandwidth ``c_h * (log n) ** -beta`` with ``0 < beta < 1/2``."""
    if not 0 < beta < 0.5:
        raise ValueError(f"beta must satisfy 0 < beta < 1/2 (got {beta})")
    if not c_h > 0:
        raise ValueError("c_h must be positive")
    if n < 3:
        raise ValueError("default bandwidth needs n >= 3")
    return c_h * math.log(n) ** (-beta)


def _is_power_of_two(N):
    return int(N) == N and N >= 1 and (int(N) & (int(N) - 1)) == 0


@dataclass
class EstimatorConfig:
    h: Optional[float] = None
    beta: float = 0.45
    c_h: float = DEFAULT_C_H
    C_M: float = 10.0
    M_n: Optional[float] = None
    eta: float = 2.0**-9
    N: int = 2**12
    x_grid: Optional[np.ndarray] = field(default=None, repr=False)
    modulus_floor: float = MODULUS_FLOOR
    jump_threshold: float = JUMP_THRESHOLD

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be positive")
        if not 0 < self.beta < 0.5:
            raise ValueError(f"beta must satisfy 0 < beta < 1/2 (got {self.beta})")
        if not self.c_h > 0:
            raise ValueError("c_h must be positive")
        if not self.C_M > 0:
            raise ValueError("C_M must be positive")
        if self.M_n is not None and not self.M_n > 0:
            raise ValueError("M_n must be positive")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not _is_power_of_two(self.N):
            raise ValueError(f"N must be a power of 2 (got {self.N})")
        if not 0 < self.jump_threshold < math.pi:
            raise ValueError("jump_threshold must lie in (0, pi)")
        if not self.modulus_floor >= 0:
            raise ValueError("modulus_floor must be nonnegative")
        if self.x_grid is not None:
            self.x_grid = np.atleast_1d(np.asarray(self.x_grid, dtype=float))

    def bandwidth(self, n):
        return self.h if self.h is not None else default_bandwidth(n, self.beta, self.c_h)

    def truncation(self, n):
        if self.M_n is not None:
            return self.M_n
        if n is None:
            return math.inf
        return self.C_M * math.log(n)

    def as_dict(self):
        d = asdict(self)
        d["x_grid"] = None if self.x_grid is None else "custom"
        return d


@dataclass
class DensityEstimate:
    x: np.ndarray
    f_hat: np.ndarray
    f_raw: np.ndarray
    config: EstimatorConfig
    lam: float
    n: Optional[int]
    h: float
    M_n: float
    eta: float
    distlog_status: DistLogStatus
    min_modulus: float
    n_corrections: int
    imag_residue: float

    @property
    def truncation_hit(self):
        return np.abs(self.f_raw) > self.M_n

    def metadata(self, **extra):
        meta = {
            "lambda": self.lam,
            "n": self.n,
            "h": self.h,
            "M_n": self.M_n,
            "eta_effective": self.eta,
            "distlog_status": str(self.distlog_status),
            "min_modulus": self.min_modulus,
            "n_corrections": self.n_corrections,
            "imag_residue": self.imag_residue,
            "config": self.config.as_dict(),
        }
        meta.update(extra)
        return meta

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "f_hat", "f_raw", "truncation_hit"])
        for x, fh_, fr, hit in zip(self.x, self.f_hat, self.f_raw, self.truncation_hit):
            writer.writerow([f"{x:.17g}", f"{fh_:.17g}", f"{fr:.17g}", int(hit)])

    def write_metadata(self, fh, **extra):
        json.dump(self.metadata(**extra), fh, indent=2, sort_keys=True)
        fh.write("\n")


def frequency_grid(h, eta, N):
    """Half-line grid on ``[0, 1/h]`` ending exactly at ``1/h``, step ``<= eta``."""
    grid = FrequencyGrid.covering(1.0 / h, eta)
    if grid.count > N:
        raise ValueError(
            f"N={N} too small for {grid.count} frequency nodes (h={h}, eta={eta}); "
            "increase N or eta"
        )
    return grid


def fft_x_grid(eta, N):
    """The x points reached by a length-N FFT of a step-``eta`` frequency grid."""
    dx = 2 * math.pi / (N * eta)
    return dx * (np.arange(N) - N // 2)


def invert_log(log_values, grid, lam, x=None, N=None):
    """Trapezoid inversion ``1/(2 pi lam) int_{-T}^{T} exp(-i t x) L(t) dt``.

    ``log_values`` live on the half-line ``grid``; ``L(-t) = conj L(t)``.
    With ``x=None`` the sum is evaluated by FFT on ``fft_x_grid(grid.eta, N)``,
    otherwise by direct summation at the given points.
    Returns ``(x, values, imag_residue)``.
    """
    t = grid.points
    w = np.ones(grid.count)
    w[0] = w[-1] = 0.5
    a = w * np.asarray(log_values) * grid.eta / (2 * math.pi * lam)
    if x is None:
        if N is None or grid.count > N:
            raise ValueError("FFT path needs N >= grid.count")
        x = fft_x_grid(grid.eta, N)
        shift = np.exp(-1j * t * x[0])
        pos = np.zeros(N, dtype=complex)
        neg = np.zeros(N, dtype=complex)
        pos[: grid.count] = a * shift
        neg[: grid.count] = np.conj(a * shift)
        total = np.fft.fft(pos) + N * np.fft.ifft(neg)
    else:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        kernel = np.exp(-1j * np.multiply.outer(x, t))
        total = kernel @ a + np.conj(kernel) @ np.conj(a)
    return x, total.real.copy(), float(np.max(np.abs(total.imag)))


def _estimate_from_psi(psi, lam, config, n, h):
    M_n = config.truncation(n)
    ul = unwrap_log(psi, config.jump_threshold, config.modulus_floor)
    if ul.status.state == "jump_suspect":
        raise GridTooCoarse(
            ul.status.index,
            f"ambiguous phase increment at t={psi.grid.points[ul.status.index]:.6g}; "
            "decrease eta",
        )
    N = config.N
    if ul.status.ok:
        x, f_raw, resid = invert_log(ul.log_values, psi.grid, lam, config.x_grid, N)
    else:
        # logarithm undefined: the estimate is set to zero
        x = config.x_grid if config.x_grid is not None else fft_x_grid(psi.grid.eta, N)
        f_raw, resid = np.zeros(x.shape[0]), 0.0
    return DensityEstimate(
        x=x,
        f_hat=np.clip(f_raw, -M_n, M_n),
        f_raw=f_raw,
        config=config,
        lam=lam,
        n=n,
        h=h,
        M_n=M_n,
        eta=psi.grid.eta,
        distlog_status=ul.status,
        min_modulus=ul.min_modulus,
        n_corrections=ul.n_corrections,
        imag_residue=resid,
    )


def estimate_density(obs, lam, config=None):
    """Truncated estimate of the jump density from observed increments.

    Parameters
    ----------
    obs : ObservationSet or array_like
        Unit-spacing increments ``X_1, ..., X_n``.
    lam : float
        Known jump intensity.
    config : EstimatorConfig, optional

    Returns
    -------
    DensityEstimate
        ``distlog_status`` is not ok when ``|psi|`` dropped below the
        modulus floor; ``f_raw`` is then identically zero.

    Raises
    ------
    GridTooCoarse
        If phase tracking meets an argument increment near pi.
    """
    config = config or EstimatorConfig()
    if not lam > 0:
        raise ValueError("lambda must be positive")
    x = np.asarray(getattr(obs, "values", obs), dtype=float)
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    h = config.bandwidth(n)
    grid = frequency_grid(h, config.eta, config.N)
    psi = deconvolve_gaussian(ecf(x, grid), lam)
    return _estimate_from_psi(psi, lam, config, n, h)


def oracle_mean_estimate(lam, jump_law, config, n=None):
    """The same pipeline with the true characteristic function of ``X``.

    This is the noise-free counterpart of ``estimate_density``: its deviation
    from the true density is the deterministic (bias) part of the error.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if config.h is None and n is None:
        raise ValueError("oracle estimate needs either config.h or n")
    h = config.bandwidth(n)
    grid = frequency_grid(h, config.eta, config.N)
    psi = deconvolve_gaussian(true_cf_X(lam, jump_law, grid), lam)
    est = _estimate_from_psi(psi, lam, config, n, h)
    assert not est.truncation_hit.any(), "truncation bound binds on the oracle estimate"
    return est
