"""Monte Carlo spread of the scaled, centred estimate at x=0.

    python scripts/normality.py --reps 300 --jobs 8
"""
import argparse
import os

from decompound.estimator import EstimatorConfig
from decompound.experiments import mc_normality
from decompound.processes import ModelSpec, normal_jumps

parser = argparse.ArgumentParser()
parser.add_argument("--n", type=int, default=5000)
parser.add_argument("--h", type=float, default=0.5)
parser.add_argument("--lam", type=float, default=1.0)
parser.add_argument("--reps", type=int, default=300)
parser.add_argument("--seed", type=int, default=1)
parser.add_argument("--jobs", type=int, default=os.cpu_count())
args = parser.parse_args()

report = mc_normality(ModelSpec(args.lam, normal_jumps(), args.n), EstimatorConfig(h=args.h),
                      0.0, args.reps, args.seed, jobs=args.jobs)
print(report.summary())
