"""Oracle bias at x=0 against bandwidth for normal and Laplace jumps."""

from decompound.experiments import bias_study
from decompound.processes import laplace_jumps, normal_jumps

H = [0.3, 0.4, 0.5, 0.6, 0.7, 0.8]

for law in (normal_jumps(), laplace_jumps()):
    rep = bias_study(law, 1.0, 0.0, H)
    print(f"{law.name} ({law.cf_decay})")
    for h, b, r in zip(rep.h_values, rep.bias, rep.rate_ratios):
        print(f"  h={h:.2f} bias={b:+.6f} bias/rate={r:.4f}")
    print(f"  max/min ratio over h>=0.4: {rep.rate_ratios[1:].max() / rep.rate_ratios[1:].min():.3f}")
    if law.cf_decay.kind == "supersmooth":
        lit = bias_study(law, 1.0, 0.0, H, rate_scale=1.0)
        print(f"  with exp(-1/h^a) normalisation: max/min over h>=0.4 = "
              f"{lit.rate_ratios[1:].max() / lit.rate_ratios[1:].min():.3f}")
