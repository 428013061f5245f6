"""Empirical and model characteristic functions on uniform frequency grids."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrequencyGrid",
    "ComplexSeries",
    "GridBeyondCutoff",
    "ecf",
    "ecf_values",
    "true_cf_X",
    "deconvolve_gaussian",
    "write_series_csv",
]

KINDS = ("ecf", "true_cf", "psi", "unwrapped_log")
# largest argument of exp() that stays finite in float64
_MAX_EXP_ARG = math.log(np.finfo(float).max)
# elements per chunk of the (frequency x observation) phase matrix
_CHUNK = 1 << 21


class GridBeyondCutoff(OverflowError):
    """The Gaussian deconvolution multiplier overflows on this grid."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Half-line grid ``t_j = eta * j``, ``j = 0..count-1``."""

    eta: float
    count: int

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("count must be a positive integer")

    @classmethod
    def covering(cls, t_max, eta):
        """Grid reaching exactly ``t_max`` with step at most ``eta``."""
        steps = max(1, math.ceil(t_max / eta - 1e-9))
        return cls(t_max / steps, steps + 1)

    @property
    def points(self):
        return self.eta * np.arange(self.count)

    @property
    def t_max(self):
        return self.eta * (self.count - 1)

    @property
    def full_points(self):
        """Mirrored grid on ``[-T, T]`` (``2*count - 1`` points)."""
        t = self.points
        return np.concatenate([-t[:0:-1], t])


@dataclass
class ComplexSeries:
    grid: FrequencyGrid
    values: np.ndarray
    kind: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.kind not in KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.values.shape != (self.grid.count,):
            raise ValueError("values do not match grid size")

    def mirrored(self):
        """Values on ``grid.full_points`` via Hermitian reflection."""
        v = self.values
        return np.concatenate([np.conj(v[:0:-1]), v])


def ecf_values(x, t):
    """``mean_k exp(i t_j x_k)`` for every ``t_j`` by direct summation."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape[0], dtype=complex)
    step = max(1, _CHUNK // max(1, x.shape[0]))
    for lo in range(0, t.shape[0], step):
        phase = np.multiply.outer(t[lo:lo + step], x)
        out.real[lo:lo + step] = np.cos(phase).sum(axis=1)
        out.imag[lo:lo + step] = np.sin(phase).sum(axis=1)
    out /= x.shape[0]
    return out


def ecf(obs, grid):
    """Empirical characteristic function of a sample (ObservationSet or array)."""
    x = getattr(obs, "values", obs)
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    values = ecf_values(x, grid.points)
    values[0] = 1.0
    return ComplexSeries(grid, values, "ecf")


def true_cf_X(lam, jump_law, grid):
    """``exp(-lam + lam * cf_W(t)) * exp(-t^2/2)`` on the grid."""
    t = grid.points
    phi_f = np.asarray(jump_law.cf(t), dtype=complex)
    values = np.exp(-lam + lam * phi_f - 0.5 * t**2)
    return ComplexSeries(grid, values, "true_cf")


def deconvolve_gaussian(series, lam):
    """Multiply by ``exp(lam + t^2/2)``, giving ``psi = exp(lam * cf_W)`` in truth."""
    if series.kind not in ("ecf", "true_cf"):
        raise ValueError(f"cannot deconvolve a series of kind {series.kind!r}")
    t = series.grid.points
    arg = lam + 0.5 * t**2
    if arg.max() > _MAX_EXP_ARG:
        raise GridBeyondCutoff(
            f"exp(lambda + t^2/2) overflows for t > {math.sqrt(2 * (_MAX_EXP_ARG - lam)):.3f}"
        )
    return ComplexSeries(series.grid, series.values * np.exp(arg), "psi")


def write_series_csv(series, fh):
    """``t,re,im`` rows preceded by a ``# kind=...`` comment line."""
    fh.write(f"# kind={series.kind}\n")
    writer = csv.writer(fh, lineterminator="\n")
    if series.kind == "unwrapped_log":
        writer.writerow(["t", "log_re", "arg_unwrapped"])
    else:
        writer.writerow(["t", "re", "im"])
    for t, v in zip(series.grid.points, series.values):
        writer.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])
