"""Fraction of replicates with an unusable logarithm for n in {50, 500, 5000}."""
import argparse
import os

from decompound.estimator import EstimatorConfig
from decompound.experiments import vanishing_frequency
from decompound.processes import normal_jumps

parser = argparse.ArgumentParser()
parser.add_argument("--h", type=float, default=0.3)
parser.add_argument("--reps", type=int, default=200)
parser.add_argument("--seed", type=int, default=1)
parser.add_argument("--modulus-floor", type=float, default=1e-8)
parser.add_argument("--jobs", type=int, default=os.cpu_count())
args = parser.parse_args()

cfg = EstimatorConfig(h=args.h, modulus_floor=args.modulus_floor)
table = vanishing_frequency(1.0, normal_jumps(), [50, 500, 5000], cfg, args.reps, args.seed,
                            jobs=args.jobs)
for row in zip(table.n_values, table.vanished, table.jump_suspect, table.fractions,
               table.median_min_modulus):
    print("n={} vanished={} jump_suspect={} fraction={:.4f} median_min|psi|={:.4g}".format(*row))
