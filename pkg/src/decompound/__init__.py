"""Nonparametric estimation of the jump density of a compound Poisson process
observed at unit spacing under additive Brownian noise."""

from .charfun import ComplexSeries, FrequencyGrid, deconvolve_gaussian, ecf, true_cf_X
from .distlog import UnwrappedLog, check_nonvanishing, unwrap_log
from .estimator import (
    DensityEstimate,
    EstimatorConfig,
    default_bandwidth,
    estimate_density,
    oracle_mean_estimate,
)
from .processes import (
    JumpLaw,
    ModelSpec,
    ObservationSet,
    laplace_jumps,
    normal_jumps,
    simulate_increment,
    simulate_observations,
)

__version__ = "0.1.0"
