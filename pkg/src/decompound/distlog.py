"""Distinguished logarithm by sequential phase tracking along a frequency grid.

The branch is fixed by the anchor ``psi(0) > 0`` (argument 0) and carried
outward one grid step at a time, each step taking the argument increment of
smallest magnitude.  Values for ``t < 0`` follow from Hermitian symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .charfun import ComplexSeries, FrequencyGrid

__all__ = [
    "DistLogStatus",
    "UnwrappedLog",
    "DistLogError",
    "Vanished",
    "JumpSuspect",
    "check_nonvanishing",
    "unwrap_log",
    "MODULUS_FLOOR",
    "JUMP_THRESHOLD",
]

MODULUS_FLOOR = 1e-8
JUMP_THRESHOLD = 0.9 * math.pi


class DistLogError(ArithmeticError):
    def __init__(self, index, message):
        super().__init__(message)
        self.index = index


class Vanished(DistLogError):
    """``|psi|`` fell below the modulus floor; the logarithm is undefined."""


class JumpSuspect(DistLogError):
    """An argument increment came too close to pi to pick a branch reliably."""


@dataclass(frozen=True)
class DistLogStatus:
    state: str = "ok"
    index: Optional[int] = None

    @property
    def ok(self):
        return self.state == "ok"

    def __str__(self):
        return self.state if self.index is None else f"{self.state}({self.index})"


@dataclass
class UnwrappedLog:
    grid: FrequencyGrid
    log_values: np.ndarray
    base_value: float
    min_modulus: float
    status: DistLogStatus
    corrections: np.ndarray

    @property
    def n_corrections(self):
        """Number of grid steps at which a 2*pi branch correction was applied."""
        return int(np.count_nonzero(np.diff(self.corrections)))

    def as_series(self):
        return ComplexSeries(self.grid, self.log_values, "unwrapped_log")

    def mirrored(self):
        """Values on ``grid.full_points``, using ``Log psi(-t) = conj Log psi(t)``."""
        v = self.log_values
        return np.concatenate([np.conj(v[:0:-1]), v])

    def raise_for_status(self):
        if self.status.state == "vanished":
            raise Vanished(self.status.index, f"psi vanishes at grid index {self.status.index}")
        if self.status.state == "jump_suspect":
            raise JumpSuspect(
                self.status.index,
                f"ambiguous argument increment at grid index {self.status.index}; refine eta",
            )


def check_nonvanishing(psi, modulus_floor=MODULUS_FLOOR):
    """First index with ``|psi| < modulus_floor``; returns ``(status, min_modulus)``."""
    values = getattr(psi, "values", psi)
    mod = np.abs(values)
    below = np.flatnonzero(mod < modulus_floor)
    status = DistLogStatus("vanished", int(below[0])) if below.size else DistLogStatus()
    return status, float(mod.min())


def unwrap_log(psi, jump_threshold=JUMP_THRESHOLD, modulus_floor=MODULUS_FLOOR):
    """Distinguished logarithm of ``psi`` on its half-line grid.

    Never raises on a bad input path; the outcome is reported in ``status``
    (see ``UnwrappedLog.raise_for_status``).  On failure ``log_values`` is
    still filled up to the failing index and zero beyond it.
    """
    if not 0 < jump_threshold < math.pi:
        raise ValueError("jump_threshold must lie in (0, pi)")
    if psi.kind != "psi":
        raise ValueError(f"expected a psi series, got kind {psi.kind!r}")
    v = psi.values
    if not (v[0].real > 0 and abs(v[0].imag) <= 1e-12 * v[0].real):
        raise ValueError("psi(0) must be real and positive")

    status, min_modulus = check_nonvanishing(v, modulus_floor)
    stop = v.shape[0] if status.ok else status.index

    principal = np.angle(v[:stop])
    if stop:
        principal[0] = 0.0
    step = np.diff(principal)
    wrapped = (step + math.pi) % (2 * math.pi) - math.pi
    k = np.rint((wrapped - step) / (2 * math.pi)).astype(np.int64)
    corrections = np.zeros(v.shape[0], dtype=np.int64)
    corrections[1:stop] = np.cumsum(k)

    suspect = np.flatnonzero(np.abs(wrapped) > jump_threshold)
    if suspect.size and (status.ok or suspect[0] + 1 < status.index):
        status = DistLogStatus("jump_suspect", int(suspect[0]) + 1)
        stop = status.index

    log_values = np.zeros(v.shape[0], dtype=complex)
    log_values.real[:stop] = np.log(np.abs(v[:stop]))
    log_values.imag[:stop] = principal[:stop] + 2 * math.pi * corrections[:stop]
    corrections[stop:] = corrections[stop - 1] if stop > 0 else 0
    return UnwrappedLog(
        grid=psi.grid,
        log_values=log_values,
        base_value=float(log_values.real[0]),
        min_modulus=min_modulus,
        status=status,
        corrections=corrections,
    )
