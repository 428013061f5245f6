"""Estimate for lambda=1, standard normal jumps, n=5000, h=0.5 next to the truth.

    python scripts/figure.py --seed 1 --out figure.csv [--plot figure.png]
"""
import argparse

from decompound.experiments import FIGURE_SEED, reproduce_figure

parser = argparse.ArgumentParser()
parser.add_argument("--seed", type=int, default=FIGURE_SEED)
parser.add_argument("--out", default="figure.csv")
parser.add_argument("--plot", default=None, help="optional PNG (needs matplotlib)")
args = parser.parse_args()

fig = reproduce_figure(seed=args.seed)
with open(args.out, "w", newline="") as fh:
    fig.write_csv(fh)
print(f"status={fig.estimate.distlog_status} MAE[-4,4]={fig.mean_abs_error():.4f} "
      f"MAE[-3,3]={fig.mean_abs_error(-3, 3):.4f}")

if args.plot:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.plot(fig.x, fig.estimate.f_hat, "k:", lw=2, label="estimate")
    plt.plot(fig.x, fig.f_true, "k--", label="true density")
    plt.legend()
    plt.savefig(args.plot, dpi=120)
