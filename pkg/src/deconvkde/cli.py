"""Command-line interface.

Exit codes: 0 success, 2 usage or input error, 3 numeric regime (overflow),
4 bandwidth minimum on the grid boundary.

Options may also come from ``--config FILE``: either ``key=value`` lines
using the long option names, or a ``manifest.json`` written by a previous
run. Command-line flags take precedence over the file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


from . import __version__
from .asymptotics import theory_curves
from .bandwidth import mise_curve, select_bandwidth
from .deconvolver import (DEFAULT_BINS, DEFAULT_NODES, EstimateConfig, estimate,
                          parse_grid, read_observations)
from .densities import Supersmooth, get_error, get_target, nsr
from .errors import BandwidthBoundaryError, ConfigurationError, NumericalRegimeError
from .kernels import get_kernel
from .simulation import FIGURES, ExperimentConfig, figure_config, regime_classifier, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_BOUNDARY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _bandwidth(text):
    if text == "auto":
        return text
    try:
        h = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bandwidth must be a number or 'auto', got {text!r}")
    if not h > 0:
        raise argparse.ArgumentTypeError("bandwidth must be positive")
    return h


def _fmt(v):
    return "nan" if v is None else f"{v:.9g}"


def read_config_file(path):
    """``key=value`` text or a JSON run manifest -> dict of option values."""
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = None
    if isinstance(doc, dict):
        return {k: v for k, v in doc.get("config", doc).items() if v is not None}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _add_model_options(p, with_n=True):
    p.add_argument("--target", default="gaussian", help="gaussian | mixture")
    p.add_argument("--error", default="gaussian", help="gaussian | laplace")
    p.add_argument("--kernel", default="fan-order-3", help="fan-order-3 | sinc")
    if with_n:
        p.add_argument("--n", type=int, default=1000)
    p.add_argument("--sigma", type=float, default=0.1)


def _add_common(p):
    p.add_argument("--config", help="key=value file or manifest.json")
    p.add_argument("--out", default=".", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="deconvkde", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a density from an observation file")
    _add_common(p)
    p.add_argument("--data", required=True, help="one observation per line")
    p.add_argument("--h", type=_bandwidth, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--error", default="gaussian")
    p.add_argument("--kernel", default="fan-order-3")
    p.add_argument("--grid", default="-3:3:0.1")
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--clip", action="store_true", help="clip negatives and renormalise")

    p = sub.add_parser("theory", help="mean and standard-deviation predictors")
    _add_common(p)
    _add_model_options(p)
    p.add_argument("--h", type=_bandwidth, default="auto")
    p.add_argument("--grid", default="-3:3:0.1")
    p.add_argument("--pdf", action="store_true", help="also write the target pdf")

    p = sub.add_parser("mise", help="exact MISE curve and its grid minimiser")
    _add_common(p)
    _add_model_options(p)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--K", type=int, default=100)

    p = sub.add_parser("simulate", help="Monte Carlo experiment")
    _add_common(p)
    _add_model_options(p)
    p.add_argument("--h", type=_bandwidth, default="auto")
    p.add_argument("--grid", default="-3:3:0.1")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("reproduce", help="rerun one of the published figure setups")
    _add_common(p)
    p.add_argument("figure", help=" | ".join(sorted(FIGURES)))
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    return parser


def _join_grid(argv):
    # "--grid -1:1:0.5" would otherwise be read as an unknown option
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--grid" and i + 1 < len(argv):
            out.append("--grid=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def parse_args(argv):
    argv = _join_grid(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config_file(args.config)
        values.pop("command", None)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        flags = {a.dest for a in subparser._actions if isinstance(a, argparse._StoreTrueAction)}
        subparser.set_defaults(**{
            k: (str(v).lower() in ("1", "true", "yes")) if k in flags else str(v)
            for k, v in values.items()})
        args = parser.parse_args(argv)
    return args


def _resolved(args):
    return {k: v for k, v in vars(args).items() if k not in ("config",)}


def _write_manifest(args, outputs, status):
    manifest = {
        "version": __version__,
        "subcommand": args.command,
        "config": _resolved(args),
        "outputs": outputs,
        "exit_status": status,
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _regime(error, sigma, h):
    if isinstance(error.smoothness, Supersmooth):
        return regime_classifier(error, sigma, h)
    return "n/a"


def cmd_estimate(args):
    if args.h == "auto":
        raise UsageError("estimate needs an explicit --h; data-driven selection is not provided")
    try:
        data = read_observations(args.data)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.data}: {exc}") from exc
    kernel, error = get_kernel(args.kernel), get_error(args.error)
    config = EstimateConfig(args.h, args.sigma, parse_grid(args.grid), args.nodes, args.bins)
    result = estimate(data, config, kernel, error, clip=args.clip)
    path = os.path.join(args.out, "estimate.csv")
    result.to_csv(path)
    print(f"n={data.size} h={args.h:g} r=sigma/h={config.r:.6g} "
          f"regime={_regime(error, args.sigma, args.h)}")
    return [path]


def _auto_h(args, target, kernel, error):
    if args.h != "auto":
        return args.h
    h, _ = select_bandwidth(target, kernel, error, args.n, args.sigma)
    return h


def cmd_theory(args):
    target, kernel, error = get_target(args.target), get_kernel(args.kernel), get_error(args.error)
    h = _auto_h(args, target, kernel, error)
    grid = parse_grid(args.grid)
    curves = theory_curves(target, kernel, error, grid, args.n, h, args.sigma)
    cols = curves.columns()
    path = os.path.join(args.out, "theory.csv")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*cols.values()):
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")
    outputs = [path]
    if args.pdf:
        pdf_path = os.path.join(args.out, "pdf.csv")
        with open(pdf_path, "w") as fh:
            fh.write("x,pdf\n")
            for x, v in zip(grid, target.pdf(grid)):
                fh.write(f"{x:.9g},{v:.9g}\n")
        outputs.append(pdf_path)
    print(f"h={h:g} nsr={nsr(target, args.sigma):.6g}%")
    if curves.has_thm3:
        print(f"sd_thm3_exact={_fmt(curves.sd_thm3_exact)}")
        print(f"sd_thm3_expansion={_fmt(curves.sd_thm3_expansion)} "
              f"(without the zeta(rho) factor: {_fmt(curves.sd_thm3_expansion_no_zeta)})")
    return outputs


def cmd_mise(args):
    target, kernel, error = get_target(args.target), get_kernel(args.kernel), get_error(args.error)
    path = os.path.join(args.out, "mise.csv")
    try:
        h, curve = select_bandwidth(target, kernel, error, args.n, args.sigma, args.step, args.K)
    except BandwidthBoundaryError:
        mise_curve(target, kernel, error, args.n, args.sigma, args.step, args.K).to_csv(path)
        raise
    curve.to_csv(path)
    print(f"h*={h:.2f}")
    return [path]


def _run_and_write(config, args):
    report = run_experiment(config)
    csv_path = os.path.join(args.out, "report.csv")
    meta_path = os.path.join(args.out, "report.json")
    report.to_csv(csv_path)
    report.write_sidecar(meta_path)
    th = report.theory
    i0 = report.at(0.0)
    print(f"h={report.config.h:g} regime={report.regime} reps={config.reps} "
          f"seconds={report.elapsed:.1f}")
    print(f"x=0: sample_sd={report.sample_sd[i0]:.6g} sd_thm1={th.sd_thm1[i0]:.6g} "
          f"sd_thm3_exact={_fmt(th.sd_thm3_exact)} sd_thm3_expansion={_fmt(th.sd_thm3_expansion)} "
          f"(without the zeta(rho) factor: {_fmt(th.sd_thm3_expansion_no_zeta)})")
    return [csv_path, meta_path]


def cmd_simulate(args):
    config = ExperimentConfig(
        target=get_target(args.target), error=get_error(args.error),
        kernel=get_kernel(args.kernel), n=args.n, sigma=args.sigma, h=args.h,
        grid=parse_grid(args.grid), reps=args.reps, seed=args.seed, workers=args.threads)
    return _run_and_write(config, args)


def cmd_reproduce(args):
    try:
        config = figure_config(args.figure, seed=args.seed, workers=args.threads, reps=args.reps)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    return _run_and_write(config, args)


COMMANDS = {
    "estimate": cmd_estimate,
    "theory": cmd_theory,
    "mise": cmd_mise,
    "simulate": cmd_simulate,
    "reproduce": cmd_reproduce,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, OSError) as exc:
        print(f"deconvkde: {exc}", file=sys.stderr)
        return EXIT_USAGE

    status, outputs = EXIT_OK, []
    try:
        os.makedirs(args.out, exist_ok=True)
        outputs = COMMANDS[args.command](args)
    except (UsageError, ConfigurationError, ValueError, OSError) as exc:
        print(f"deconvkde: {exc}", file=sys.stderr)
        status = EXIT_USAGE
    except NumericalRegimeError as exc:
        print(f"deconvkde: {exc}", file=sys.stderr)
        status = EXIT_NUMERIC
    except BandwidthBoundaryError as exc:
        print(f"deconvkde: {exc}", file=sys.stderr)
        status = EXIT_BOUNDARY
    if os.path.isdir(args.out):
        _write_manifest(args, outputs, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
