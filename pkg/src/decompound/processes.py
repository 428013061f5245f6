"""Simulation of a compound Poisson process observed under Brownian noise.

Each observed increment is ``X = Y + Z`` where ``Y`` is a Poisson(lambda) sum
of i.i.d. jumps ``W`` and ``Z`` is standard normal, on a unit time grid.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats

__all__ = [
    "CFDecay",
    "JumpLaw",
    "ModelSpec",
    "ObservationSet",
    "JumpSamplerError",
    "normal_jumps",
    "laplace_jumps",
    "get_jump_law",
    "poisson_inversion",
    "simulate_increment",
    "simulate_increments",
    "simulate_observations",
    "write_observations_csv",
    "read_observations_csv",
    "BLOCK_SIZE",
    "MAX_LAMBDA",
]

# Poisson inversion-by-search is only used in the small-intensity regime.
MAX_LAMBDA = 30.0
# Increments are simulated in fixed blocks, each block on its own RNG substream.
BLOCK_SIZE = 4096


class JumpSamplerError(RuntimeError):
    """Raised when a jump sampler produces non-finite draws."""


@dataclass(frozen=True)
class CFDecay:
    """Tail behaviour of the jump characteristic function.

    ``kind == "supersmooth"``: ``|cf(t)| = O(exp(-scale * |t|**exponent))``.
    ``kind == "ordinary"``: ``|cf(t)| = O(|t|**-exponent)``.
    """

    kind: str
    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("supersmooth", "ordinary"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.exponent <= 1:
            raise ValueError("decay exponent must exceed 1")

    def bias_rate(self, h, scale=None):
        """Bias rate ``h**(a-1) * exp(-s / h**a)`` or ``h**(g-1)`` at bandwidth ``h``."""
        h = np.asarray(h, dtype=float)
        if self.kind == "ordinary":
            return h ** (self.exponent - 1)
        s = self.scale if scale is None else scale
        return h ** (self.exponent - 1) * np.exp(-s / h**self.exponent)


@dataclass(frozen=True)
class JumpLaw:
    """Law of a single jump ``W``.

    ``sampler(rng, size)`` returns an array of draws, ``cf(t)`` the
    characteristic function on an array of frequencies and ``density(x)``
    (optional) the true density.
    """

    name: str
    sampler: Callable[[np.random.Generator, int], np.ndarray]
    cf: Callable[[np.ndarray], np.ndarray]
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    cf_decay: Optional[CFDecay] = None

    def sample(self, rng, size):
        w = np.asarray(self.sampler(rng, size), dtype=float).reshape(-1)
        if w.shape[0] != size:
            raise JumpSamplerError(
                f"jump law {self.name!r} returned {w.shape[0]} draws, expected {size}"
            )
        if not np.all(np.isfinite(w)):
            raise JumpSamplerError(f"jump law {self.name!r} produced non-finite draws")
        return w


def _normal_sampler(rng, size):
    return rng.standard_normal(size)


def _normal_cf(t):
    return np.exp(-0.5 * np.asarray(t, dtype=float) ** 2) + 0j


def _laplace_sampler(rng, size):
    return rng.laplace(0.0, 1.0, size)


def _laplace_cf(t):
    return 1.0 / (1.0 + np.asarray(t, dtype=float) ** 2) + 0j


def normal_jumps():
    # exp(-t^2/2) = exp(-0.5 |t|^2): supersmooth with exponent 2, scale 1/2
    return JumpLaw("normal", _normal_sampler, _normal_cf, stats.norm.pdf,
                   CFDecay("supersmooth", 2.0, scale=0.5))


def laplace_jumps():
    return JumpLaw("laplace", _laplace_sampler, _laplace_cf, stats.laplace.pdf,
                   CFDecay("ordinary", 2.0))


_BUILTIN_LAWS = {"normal": normal_jumps, "laplace": laplace_jumps}


def get_jump_law(name):
    try:
        return _BUILTIN_LAWS[name]()
    except KeyError:
        raise ValueError(
            f"unknown jump law {name!r}; choose from {sorted(_BUILTIN_LAWS)}"
        ) from None


@dataclass(frozen=True)
class ModelSpec:
    lam: float
    jump_law: JumpLaw
    n: int
    delta: float = 1.0

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive and finite, got {self.lam}")
        if self.lam > MAX_LAMBDA:
            raise ValueError(f"lambda={self.lam} exceeds supported range (<= {MAX_LAMBDA})")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.delta != 1.0:
            raise ValueError("only unit observation spacing (delta=1) is supported")


@dataclass
class ObservationSet:
    values: np.ndarray
    spec: ModelSpec
    seed: int
    y: Optional[np.ndarray] = field(default=None, repr=False)
    z: Optional[np.ndarray] = field(default=None, repr=False)
    jump_count: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.spec.n,):
            raise ValueError("number of values does not match spec.n")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observations must be finite")

    def __len__(self):
        return self.values.shape[0]

    @property
    def has_breakdown(self):
        return self.y is not None


def poisson_inversion(u, lam):
    """Poisson(lam) variates from uniforms by inversion (search on the cdf).

    The cdf table is extended until it exceeds every uniform, so the result is
    exact up to floating-point rounding of the cdf.
    """
    u = np.asarray(u, dtype=float)
    p = math.exp(-lam)
    cdf = [p]
    k = 0
    umax = float(u.max()) if u.size else 0.0
    while cdf[-1] <= umax and cdf[-1] < 1.0:
        k += 1
        p *= lam / k
        if p == 0.0:
            break
        cdf.append(cdf[-1] + p)
    return np.searchsorted(np.asarray(cdf), u, side="right").astype(np.int64)


def simulate_increments(lam, jump_law, rng, size):
    """Draw ``size`` independent increments; returns ``(y, z, jump_count)``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    counts = poisson_inversion(rng.random(size), lam)
    total = int(counts.sum())
    w = jump_law.sample(rng, total) if total else np.zeros(0)
    owner = np.repeat(np.arange(size), counts)
    y = np.bincount(owner, weights=w, minlength=size).astype(float)
    z = rng.standard_normal(size)
    return y, z, counts


def simulate_increment(lam, jump_law, rng):
    """A single increment ``(y, z, jump_count)``."""
    y, z, k = simulate_increments(lam, jump_law, rng, 1)
    return float(y[0]), float(z[0]), int(k[0])


def simulate_observations(spec, seed):
    """Simulate ``spec.n`` increments, deterministically in ``(spec, seed)``.

    The increments are produced in blocks of ``BLOCK_SIZE``; block ``b`` draws
    from the ``b``-th child of ``SeedSequence(seed)``, so any block can be
    regenerated independently of the others.
    """
    n = spec.n
    nblocks = -(-n // BLOCK_SIZE)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    ys, zs, ks = [], [], []
    for b, child in enumerate(children):
        size = min(BLOCK_SIZE, n - b * BLOCK_SIZE)
        rng = np.random.Generator(np.random.PCG64(child))
        y, z, k = simulate_increments(spec.lam, spec.jump_law, rng, size)
        ys.append(y)
        zs.append(z)
        ks.append(k)
    y = np.concatenate(ys)
    z = np.concatenate(zs)
    k = np.concatenate(ks)
    return ObservationSet(values=y + z, spec=spec, seed=seed, y=y, z=z, jump_count=k)


def write_observations_csv(obs, fh):
    """Write ``index,x,y,z,jump_count`` rows with round-trippable floats."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["index", "x", "y", "z", "jump_count"])
    have = obs.has_breakdown
    for i, x in enumerate(obs.values):
        if have:
            row = [i, f"{x:.17g}", f"{obs.y[i]:.17g}", f"{obs.z[i]:.17g}", int(obs.jump_count[i])]
        else:
            row = [i, f"{x:.17g}", "", "", ""]
        writer.writerow(row)


def read_observations_csv(path):
    """Read the ``x`` column from an observations CSV (``#`` comment lines skipped)."""
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or "x" not in reader.fieldnames:
        raise ValueError(f"{path}: no 'x' column")
    values = np.array([float(r["x"]) for r in reader])
    if values.size == 0:
        raise ValueError(f"{path}: no observations")
    return values
