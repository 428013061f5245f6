"""Command-line interface.

Exit codes: 0 success, 2 invalid arguments or input, 3 undefined logarithm
under ``--strict`` (or a frequency grid too coarse to track the phase).
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
import tempfile

import numpy as np

from . import experiments
from .estimator import EstimatorConfig, GridTooCoarse, estimate_density
from .experiments import TooManyVanished
from .processes import (
    ModelSpec,
    get_jump_law,
    read_observations_csv,
    simulate_observations,
    write_observations_csv,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNDEFINED = 3

# flags that do not influence output contents
_NOT_IN_HEADER = {"out", "config", "jobs", "command", "func"}


class UsageError(Exception):
    pass


def _default_seed():
    try:
        return int(os.environ.get("DECOMPOUND_SEED", "0"))
    except ValueError:
        return 0


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(p):
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="master seed (default: $DECOMPOUND_SEED or 0)")
    p.add_argument("--config", help="file of key=value lines; flags take precedence")


def _add_model(p, n_default=5000):
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="jump intensity")
    p.add_argument("--n", type=int, default=n_default, help="number of increments")
    p.add_argument("--jump", default="normal", help="jump law: normal or laplace")


def _add_estimator(p):
    p.add_argument("--h", type=float, default=None, help="bandwidth (default: c_h (log n)^-beta)")
    p.add_argument("--beta", type=float, default=0.45)
    p.add_argument("--c-h", dest="c_h", type=float, default=EstimatorConfig.c_h)
    p.add_argument("--C-M", dest="C_M", type=float, default=10.0, help="M_n = C_M log n")
    p.add_argument("--eta", type=float, default=2.0**-9, help="frequency step")
    p.add_argument("--N", type=int, default=2**12, help="FFT size (power of 2)")
    p.add_argument("--modulus-floor", dest="modulus_floor", type=float, default=1e-8)
    p.add_argument("--jump-threshold", dest="jump_threshold", type=float, default=0.9 * math.pi)


def _add_x_grid(p):
    p.add_argument("--x-min", dest="x_min", type=float, default=None)
    p.add_argument("--x-max", dest="x_max", type=float, default=None)
    p.add_argument("--x-step", dest="x_step", type=float, default=None,
                   help="uniform x grid; omit all three for the FFT grid")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="decompound",
        description="Jump-density estimation for compound Poisson processes under Gaussian noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate increments X = Y + Z")
    _add_common(p)
    _add_model(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the jump density")
    _add_common(p)
    _add_model(p)
    _add_estimator(p)
    _add_x_grid(p)
    p.add_argument("--input", default=None, help="observations CSV (x column); else simulate")
    p.add_argument("--strict", action="store_true", help="exit 3 if the logarithm is undefined")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("mc-normality", help="Monte Carlo check of the limiting variance")
    _add_common(p)
    _add_model(p)
    _add_estimator(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--reps", type=int, default=300)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_mc_normality)

    p = sub.add_parser("vanishing", help="frequency of an undefined logarithm versus n")
    _add_common(p)
    _add_model(p)
    _add_estimator(p)
    p.add_argument("--n-values", dest="n_values", type=_int_list, default=[50, 500, 5000])
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--oracle", action="store_true", help="use the true characteristic function")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_vanishing)

    p = sub.add_parser("bias-study", help="oracle bias versus bandwidth")
    _add_common(p)
    _add_model(p)
    _add_estimator(p)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--h-values", dest="h_values", type=_float_list,
                   default=[0.4, 0.5, 0.6, 0.7, 0.8])
    p.add_argument("--rate-scale", dest="rate_scale", type=float, default=None,
                   help="override the exponential scale in the supersmooth rate")
    p.set_defaults(func=cmd_bias_study)

    p = sub.add_parser("reproduce-figure", help="lambda=1, normal jumps, n=5000, h=0.5")
    _add_common(p)
    p.add_argument("--eta", type=float, default=2.0**-9)
    p.set_defaults(func=cmd_reproduce_figure)
    return parser


def read_config(path, accepted=None):
    """``key=value`` lines (optionally ``# key=value``) as argv tokens.

    Keys whose flag is not in ``accepted`` (when given) are skipped, so one
    file can serve several subcommands.
    """
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}")
    tokens = []
    for line in lines:
        line = line.strip()
        if line.startswith("#"):
            line = line[1:].strip()
        if not line or "=" not in line or "," in line.split("=", 1)[0]:
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "command" or value in ("", "None"):
            continue
        flag = "--" + key.replace("_", "-")
        if accepted is not None and flag not in accepted:
            continue
        if value in ("True", "False"):
            if value == "True":
                tokens.append(flag)
            continue
        tokens.extend([flag, value])
    return tokens


_FLAG_NAMES = {"lam": "lambda", "c_h": "c-h", "C_M": "C-M"}


def header_lines(args):
    """Resolved configuration as ``# key=value`` lines (re-readable via --config)."""
    out = [f"# command={args.command}"]
    for key in sorted(vars(args)):
        if key in _NOT_IN_HEADER:
            continue
        value = getattr(args, key)
        if isinstance(value, list):
            value = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        out.append(f"# {_FLAG_NAMES.get(key, key)}={value}")
    return "\n".join(out) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _spec(args):
    return ModelSpec(args.lam, get_jump_law(args.jump), args.n)


def _config(args, **overrides):
    kw = dict(h=args.h, beta=args.beta, c_h=args.c_h, C_M=args.C_M, eta=args.eta, N=args.N,
              modulus_floor=args.modulus_floor, jump_threshold=args.jump_threshold)
    kw.update(overrides)
    return EstimatorConfig(**kw)


def _x_grid(args):
    given = [args.x_min, args.x_max, args.x_step]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise UsageError("--x-min, --x-max and --x-step must be given together")
    if not args.x_step > 0 or args.x_max < args.x_min:
        raise UsageError("need x-step > 0 and x-max >= x-min")
    count = int(math.floor((args.x_max - args.x_min) / args.x_step + 1e-9)) + 1
    return args.x_min + args.x_step * np.arange(count)


def _render(args, write):
    buf = io.StringIO()
    buf.write(header_lines(args))
    write(buf)
    return buf.getvalue()


def cmd_simulate(args):
    obs = simulate_observations(_spec(args), args.seed)
    write_atomic(args.out, _render(args, lambda fh: write_observations_csv(obs, fh)))
    return EXIT_OK


def cmd_estimate(args):
    config = _config(args, x_grid=_x_grid(args))
    if args.input:
        try:
            x = read_observations_csv(args.input)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read input {args.input}: {exc}")
        args.n = int(x.shape[0])
    else:
        x = simulate_observations(_spec(args), args.seed)
    if args.lam <= 0:
        raise UsageError("lambda must be positive")
    est = estimate_density(x, args.lam, config)
    undefined = not est.distlog_status.ok
    if undefined:
        if args.strict:
            print(f"error: distinguished logarithm undefined ({est.distlog_status})",
                  file=sys.stderr)
            return EXIT_UNDEFINED
        print(f"warning: distinguished logarithm undefined ({est.distlog_status}); "
              "estimate set to zero", file=sys.stderr)
    write_atomic(args.out, _render(args, est.write_csv))
    meta = io.StringIO()
    est.write_metadata(meta, seed=args.seed, input=args.input)
    write_atomic(args.out + ".json", meta.getvalue())
    return EXIT_OK


def cmd_mc_normality(args):
    report = experiments.mc_normality(_spec(args), _config(args), args.x, args.reps,
                                      args.seed, jobs=args.jobs)
    summary = report.summary()

    def write(fh):
        for line in summary.splitlines():
            fh.write(f"# {line}\n")
        report.write_csv(fh)

    write_atomic(args.out, _render(args, write))
    print(summary)
    return EXIT_OK


def cmd_vanishing(args):
    if args.h is None:
        raise UsageError("vanishing requires --h")
    table = experiments.vanishing_frequency(
        args.lam, get_jump_law(args.jump), args.n_values, _config(args), args.reps,
        args.seed, oracle=args.oracle, jobs=args.jobs,
    )
    write_atomic(args.out, _render(args, table.write_csv))
    for n, f in zip(table.n_values, table.fractions):
        print(f"n={n} fraction_undefined={f:.4f}")
    return EXIT_OK


def cmd_bias_study(args):
    report = experiments.bias_study(get_jump_law(args.jump), args.lam, args.x, args.h_values,
                                    _config(args), rate_scale=args.rate_scale)
    write_atomic(args.out, _render(args, report.write_csv))
    print(f"{report.jump_law}: rate ratio max/min = {report.ratio_spread:.4f}")
    return EXIT_OK


def cmd_reproduce_figure(args):
    fig = experiments.reproduce_figure(seed=args.seed, config=EstimatorConfig(eta=args.eta))
    write_atomic(args.out, _render(args, fig.write_csv))
    print(f"distlog_status={fig.estimate.distlog_status} "
          f"mean_abs_error={fig.mean_abs_error():.4f}")
    return EXIT_OK


def _subcommand_flags(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return set(action.choices[command]._option_string_actions)
    return set()


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            tokens = read_config(args.config, _subcommand_flags(parser, args.command))
            args = parser.parse_args([argv[0]] + tokens + argv[1:])
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (GridTooCoarse, TooManyVanished) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
