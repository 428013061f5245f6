"""Monte Carlo and oracle studies of the decompounding estimator.

* ``mc_normality``: spread of the scaled, centred estimate at a point,
  compared with the limiting variance ``exp(2 lam) / (2 pi^2 lam^2)``.
* ``vanishing_frequency``: how often the distinguished logarithm of the
  data-based ``psi`` cannot be formed, as a function of ``n``.
* ``bias_study``: oracle bias against the smoothness-dependent rate.
* ``reproduce_figure``: one estimate for ``lam=1``, normal jumps, ``n=5000``,
  ``h=0.5`` alongside the true density.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import stats

from .charfun import FrequencyGrid, deconvolve_gaussian, ecf, true_cf_X
from .distlog import unwrap_log
from .estimator import (
    EstimatorConfig,
    GridTooCoarse,
    estimate_density,
    oracle_mean_estimate,
)
from .processes import ModelSpec, normal_jumps, simulate_observations

__all__ = [
    "TooManyVanished",
    "NormalityReport",
    "VanishingTable",
    "BiasReport",
    "FigureResult",
    "zeta",
    "target_variance",
    "replicate_seeds",
    "mc_normality",
    "vanishing_frequency",
    "nonincreasing_within",
    "bias_study",
    "reproduce_figure",
    "FIGURE_SEED",
]

FIGURE_SEED = 1


class TooManyVanished(RuntimeError):
    """More than a tenth of the Monte Carlo replicates had no usable logarithm."""


def zeta(n, h):
    """Normalisation ``sqrt(n) / (h * exp(1 / (2 h^2)))``."""
    return math.sqrt(n) / h * math.exp(-1.0 / (2.0 * h * h))


def target_variance(lam):
    return math.exp(2.0 * lam) / (2.0 * math.pi**2 * lam**2)


def replicate_seeds(seed, reps):
    """Independent 64-bit seeds for ``reps`` replicates of a master seed."""
    children = np.random.SeedSequence(seed).spawn(reps)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def _pool_map(fn, items, jobs):
    if jobs is None or jobs <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- asymptotic normality ---------------------------------------------------


def _normality_replicate(args):
    spec, config, seed = args
    obs = simulate_observations(spec, seed)
    try:
        est = estimate_density(obs, spec.lam, config)
    except GridTooCoarse:
        return math.nan, "jump_suspect"
    return float(est.f_hat[0]), est.distlog_status.state


@dataclass
class NormalityReport:
    reps: int
    n: int
    x: float
    h: float
    lam: float
    zeta: float
    seeds: list
    estimates: np.ndarray
    states: list
    stats: np.ndarray
    sample_variance: float
    target_variance: float
    skewness: float
    excess_kurtosis: float
    quantile_skewness: float
    vanished_count: int

    @property
    def variance_ratio(self):
        return self.sample_variance / self.target_variance

    def summary(self):
        return "\n".join([
            f"reps={self.reps} n={self.n} x={self.x} h={self.h} lambda={self.lam}",
            f"zeta={self.zeta:.6g} vanished={self.vanished_count}",
            f"sample_variance={self.sample_variance:.6g} target={self.target_variance:.6g} "
            f"ratio={self.variance_ratio:.4f}",
            f"skewness={self.skewness:.4f} quantile_skewness={self.quantile_skewness:.4f} "
            f"excess_kurtosis={self.excess_kurtosis:.4f}",
        ])

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["replicate", "seed", "f_hat", "stat", "status"])
        k = 0
        for i, (s, f, st) in enumerate(zip(self.seeds, self.estimates, self.states)):
            if st == "ok":
                stat = f"{self.stats[k]:.17g}"
                k += 1
            else:
                stat = ""
            writer.writerow([i, s, f"{f:.17g}", stat, st])


def _bowley_skewness(v):
    q1, q2, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    return float((q3 + q1 - 2 * q2) / (q3 - q1)) if q3 > q1 else 0.0


def mc_normality(spec, config, x, reps, seed, jobs=1):
    """Monte Carlo distribution of ``zeta(n,h) * (f_hat(x) - mean f_hat(x))``.

    The estimate is centred at the replicate mean, the empirical stand-in for
    its expectation.  Replicates whose logarithm is undefined are dropped and
    counted; more than ``reps/10`` of them raises ``TooManyVanished``.
    """
    if reps < 50:
        raise ValueError("mc_normality needs reps >= 50")
    config = replace(config, x_grid=np.array([float(x)]))
    h = config.bandwidth(spec.n)
    seeds = replicate_seeds(seed, reps)
    results = _pool_map(_normality_replicate, [(spec, config, s) for s in seeds], jobs)
    estimates = np.array([r[0] for r in results])
    states = [r[1] for r in results]
    ok = np.array([s == "ok" for s in states])
    vanished = int((~ok).sum())
    if vanished > reps / 10:
        raise TooManyVanished(f"{vanished} of {reps} replicates had an undefined logarithm")
    z = zeta(spec.n, h)
    kept = estimates[ok]
    st = z * (kept - kept.mean())
    st -= st.mean()
    return NormalityReport(
        reps=reps,
        n=spec.n,
        x=float(x),
        h=h,
        lam=spec.lam,
        zeta=z,
        seeds=seeds,
        estimates=estimates,
        states=states,
        stats=st,
        sample_variance=float(np.var(st, ddof=1)),
        target_variance=target_variance(spec.lam),
        skewness=float(stats.skew(st)),
        excess_kurtosis=float(stats.kurtosis(st)),
        quantile_skewness=_bowley_skewness(st),
        vanished_count=vanished,
    )


# -- well-definedness of the logarithm ---------------------------------------


def _vanishing_replicate(args):
    lam, law, n, grid, config, seed, oracle = args
    if oracle:
        series = true_cf_X(lam, law, grid)
    else:
        obs = simulate_observations(ModelSpec(lam, law, n), seed)
        series = ecf(obs, grid)
    ul = unwrap_log(deconvolve_gaussian(series, lam), config.jump_threshold, config.modulus_floor)
    return ul.status.state, ul.min_modulus


@dataclass
class VanishingTable:
    h: float
    reps: int
    n_values: list
    vanished: list
    jump_suspect: list
    median_min_modulus: list

    @property
    def fractions(self):
        """Fraction of replicates with no usable logarithm (either failure mode)."""
        return [(v + j) / self.reps for v, j in zip(self.vanished, self.jump_suspect)]

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "reps", "vanished", "jump_suspect", "fraction", "median_min_modulus"])
        for row in zip(self.n_values, self.vanished, self.jump_suspect, self.fractions,
                       self.median_min_modulus):
            n, v, j, f, m = row
            writer.writerow([n, self.reps, v, j, f"{f:.17g}", f"{m:.17g}"])


def vanishing_frequency(lam, jump_law, n_values, config, reps, seed, oracle=False, jobs=1):
    """Per ``n``, the fraction of replicates whose ``psi`` is unusable on ``[0, 1/h]``.

    A replicate counts as failed if ``|psi|`` drops below the modulus floor
    or if phase tracking meets an ambiguous increment (a zero passed between
    grid points).  With ``oracle=True`` the true characteristic function is
    used instead of the data.
    """
    if reps < 100:
        raise ValueError("vanishing_frequency needs reps >= 100")
    if config.h is None:
        raise ValueError("vanishing_frequency needs an explicit bandwidth")
    grid = FrequencyGrid.covering(1.0 / config.h, config.eta)
    table = VanishingTable(config.h, reps, list(n_values), [], [], [])
    for i, n in enumerate(table.n_values):
        seeds = replicate_seeds([seed, i], reps)
        args = [(lam, jump_law, n, grid, config, s, oracle) for s in seeds]
        results = _pool_map(_vanishing_replicate, args, jobs)
        states = [r[0] for r in results]
        table.vanished.append(states.count("vanished"))
        table.jump_suspect.append(states.count("jump_suspect"))
        table.median_min_modulus.append(float(np.median([r[1] for r in results])))
    return table


def nonincreasing_within(fractions, reps, z=2.0, max_inversions=1):
    """True if ``fractions`` never increase, except for at most ``max_inversions``
    increases each smaller than ``z`` binomial standard errors."""
    inversions = 0
    for a, b in zip(fractions, fractions[1:]):
        if b <= a:
            continue
        p = 0.5 * (a + b)
        se = math.sqrt(max(p * (1 - p), 1e-300) * 2.0 / reps)
        if b - a > z * se:
            return False
        inversions += 1
    return inversions <= max_inversions


# -- bias ---------------------------------------------------------------------


@dataclass
class BiasReport:
    jump_law: str
    decay: object
    x: float
    h_values: np.ndarray
    bias: np.ndarray
    rate_ratios: np.ndarray
    rate_scale: Optional[float] = None

    @property
    def ratio_spread(self):
        r = np.abs(self.rate_ratios)
        return float(r.max() / r.min())

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["h", "bias", "rate_ratio"])
        for h, b, r in zip(self.h_values, self.bias, self.rate_ratios):
            writer.writerow([f"{h:.17g}", f"{b:.17g}", f"{r:.17g}"])


def bias_study(jump_law, lam, x, h_values, config=None, rate_scale=None):
    """Oracle bias ``E f_hat(x) - f(x)`` over bandwidths, normalised by its rate.

    For supersmooth laws the rate is ``h**(a-1) * exp(-s / h**a)`` with ``s``
    taken from the law's decay tag unless ``rate_scale`` overrides it.
    """
    if jump_law.density is None or jump_law.cf_decay is None:
        raise ValueError("bias_study needs a jump law with density and decay tag")
    h_values = np.asarray(h_values, dtype=float)
    if np.any(np.diff(h_values) <= 0):
        raise ValueError("h_values must be strictly increasing")
    base = config or EstimatorConfig()
    bias = []
    for h in h_values:
        cfg = replace(base, h=float(h), x_grid=np.array([float(x)]))
        est = oracle_mean_estimate(lam, jump_law, cfg)
        bias.append(est.f_raw[0] - float(jump_law.density(x)))
    bias = np.array(bias)
    ratios = np.abs(bias) / jump_law.cf_decay.bias_rate(h_values, scale=rate_scale)
    return BiasReport(jump_law.name, jump_law.cf_decay, float(x), h_values, bias, ratios,
                      rate_scale)


# -- figure -------------------------------------------------------------------


@dataclass
class FigureResult:
    estimate: object
    f_true: np.ndarray = field(repr=False)
    seed: int = FIGURE_SEED

    @property
    def x(self):
        return self.estimate.x

    def mean_abs_error(self, lo=-np.inf, hi=np.inf):
        m = (self.x >= lo - 1e-12) & (self.x <= hi + 1e-12)
        return float(np.mean(np.abs(self.estimate.f_hat[m] - self.f_true[m])))

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "f_hat", "f_true"])
        for x, f, t in zip(self.x, self.estimate.f_hat, self.f_true):
            writer.writerow([f"{x:.17g}", f"{f:.17g}", f"{t:.17g}"])


def figure_x_grid():
    return np.round(np.linspace(-4.0, 4.0, 401), 12)


def reproduce_figure(seed=FIGURE_SEED, lam=1.0, n=5000, h=0.5, config=None):
    """Estimate for ``lam=1``, standard normal jumps, ``n=5000``, ``h=0.5``."""
    law = normal_jumps()
    obs = simulate_observations(ModelSpec(lam, law, n), seed)
    cfg = replace(config or EstimatorConfig(), h=h, x_grid=figure_x_grid())
    est = estimate_density(obs, lam, cfg)
    return FigureResult(est, law.density(est.x), seed)
