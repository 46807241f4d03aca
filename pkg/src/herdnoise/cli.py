"""Command-line interface.

Subcommands: simulate (run an experiment from a config file), reproduce
(built-in benchmark experiments with a measured-vs-predicted table),
analyze (re-run statistics on a stored series.csv), predict (print the
exponent formulas for given parameters).

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 benchmark comparison outside tolerance.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, runner
from .config import ExperimentConfig
from .errors import ConfigError, HerdnoiseError
from .sde import SdeKind, SdeSpec, predict_exponents

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_TOLERANCE = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="herdnoise",
        description="herding-model simulation and power-law analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate",
                           help="run an experiment from a config file")
    p_sim.add_argument("--config", help="key = value config file")
    p_sim.add_argument("--out", help="output directory (overrides output.dir)")

    p_rep = sub.add_parser("reproduce", help="run a built-in benchmark")
    p_rep.add_argument("--figure", required=True, choices=runner.FIGURES)
    p_rep.add_argument("--out", required=True, help="output root directory")
    p_rep.add_argument("--scale", type=float, default=1.0,
                       help="run-length multiplier (smoke testing)")

    p_ana = sub.add_parser("analyze", help="re-run stats on a series.csv")
    p_ana.add_argument("--series", required=True)
    p_ana.add_argument("--out", required=True)
    p_ana.add_argument("--config", help="optional analysis config file")

    p_pre = sub.add_parser("predict", help="print predicted exponents")
    p_pre.add_argument("--kind", default="return_y",
                       choices=[k.value for k in SdeKind])
    p_pre.add_argument("--alpha", type=float, default=0.0)
    p_pre.add_argument("--eps1", type=float, default=0.0)
    p_pre.add_argument("--eps2", type=float, default=0.0)
    p_pre.add_argument("--eta", type=float, default=1.5)
    p_pre.add_argument("--lam", type=float, default=3.0)
    return parser


def _collect_overrides(extra: list) -> dict:
    """Turn leftover --dotted.key value tokens into config overrides."""
    overrides = {}
    i = 0
    while i < len(extra):
        token = extra[i]
        if not token.startswith("--") or "." not in token:
            raise ConfigError(f"unrecognized argument: {token}")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            i += 1
            if i >= len(extra):
                raise ConfigError(f"missing value for --{key}")
            value = extra[i]
        overrides[key] = value
        i += 1
    return overrides


def _cmd_simulate(args, extra) -> int:
    cfg = (ExperimentConfig.from_file(args.config) if args.config
           else ExperimentConfig.defaults())
    cfg = cfg.override(_collect_overrides(extra))
    manifest = runner.run_experiment(cfg, out_dir=args.out)
    for row in manifest.summary:
        print(_format_row(row))
    print(f"artifacts: {', '.join(sorted(manifest.artifacts.values()))}")
    return EXIT_OK


def _cmd_reproduce(args, extra) -> int:
    if extra:
        raise ConfigError(f"unrecognized argument: {extra[0]}")
    rows, _ = runner.reproduce_figure(args.figure, args.out, scale=args.scale)
    for row in rows:
        print(f"[{row['figure']} alpha={row['alpha']}] {_format_row(row)}")
    if not runner.all_passed(rows):
        print("comparison failed: at least one quantity outside tolerance",
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def _cmd_analyze(args, extra) -> int:
    cfg = (ExperimentConfig.from_file(args.config) if args.config
           else ExperimentConfig.defaults())
    cfg = cfg.override(_collect_overrides(extra))
    artifacts = runner.analyze_series(args.series, cfg, args.out)
    print(f"wrote: {', '.join(sorted(artifacts.values()))}")
    return EXIT_OK


def _cmd_predict(args, extra) -> int:
    if extra:
        raise ConfigError(f"unrecognized argument: {extra[0]}")
    spec = SdeSpec(kind=SdeKind(args.kind), eps1=args.eps1, eps2=args.eps2,
                   alpha=args.alpha, eta=args.eta, lam=args.lam)
    exps = predict_exponents(spec)
    print(f"eta    = {exps.eta:g}")
    print(f"lambda = {exps.lam:g}")
    print(f"beta   = {exps.beta:g}")
    return EXIT_OK


def _format_row(row: dict) -> str:
    measured = row["measured"]
    predicted = row["predicted"]
    if predicted != "":
        status = "PASS" if row["pass"] else "FAIL"
        return (f"{row['quantity']}: measured={measured:.4g} "
                f"predicted={predicted:.4g} |err|={row['abs_error']:.3g} "
                f"tol={row['tolerance']:.3g} {status}")
    if row["pass"] != "":
        status = "PASS" if row["pass"] else "FAIL"
        return (f"{row['quantity']}: measured={measured:.4g} "
                f"threshold={row['tolerance']:.3g} {status}")
    return f"{row['quantity']}: measured={measured:.4g}"


def main(argv=None) -> int:
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    handlers = {"simulate": _cmd_simulate, "reproduce": _cmd_reproduce,
                "analyze": _cmd_analyze, "predict": _cmd_predict}
    try:
        return handlers[args.command](args, extra)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HerdnoiseError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
