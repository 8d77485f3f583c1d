"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 invalid config, 3 numerical failure,
4 verdict violation (suitable for CI gating).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bounds import (
    ArimaExample,
    FlnExample,
    LfsnExample,
    OuExample,
    corollary_rate,
    theoretical_rate,
)
from .errors import AccuracyError, ConfigError, LevymaError
from .harness import (
    ExperimentConfig,
    resolve_model,
    run_experiment,
    _sim_grid_for,
)
from .simulate import dump_paths, sample_paths

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3
_EXIT_VIOLATION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="levyma", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="master seed override")
        sp.add_argument("--threads", type=int, help="worker threads")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    for name in ("simulate", "rates", "bounds", "rho"):
        sp = sub.add_parser(name)
        common(sp)
    tp = sub.add_parser("table", help="print rate-table exponents")
    tp.add_argument("--example", choices=("ou", "lfsn", "fln", "farima"))
    tp.add_argument("--alpha-beta", type=str, help="alpha*beta as a fraction, e.g. 5/2")
    tp.add_argument("--H", type=str)
    tp.add_argument("--beta", type=str)
    tp.add_argument("--rho", type=str)
    tp.add_argument("--eps", type=str)
    tp.add_argument("--d", type=str)
    rp = sub.add_parser("report", help="merge harness CSVs into a summary")
    rp.add_argument("csvs", nargs="+")
    rp.add_argument("--out", default="-")
    return p


def _load_config(args, kind: str) -> ExperimentConfig:
    if args.config:
        with open(args.config) as fh:
            config = ExperimentConfig.parse(fh.read())
        if config.kind != kind:
            raise ConfigError(
                f"config kind {config.kind!r} does not match subcommand {kind!r}")
    else:
        raise ConfigError("--config is required for this subcommand")
    if args.seed is not None:
        config.master_seed = int(args.seed)
    if args.threads is not None:
        config.threads = max(1, int(args.threads))
    if args.out:
        config.out_dir = args.out
    return config


def _cmd_experiment(args, kind: str) -> int:
    config = _load_config(args, kind)
    report = run_experiment(config)
    path = report.write(config.out_dir or ".", config.name, args.format)
    summary = {m: e.get("verdict") for m, e in report.fits.items()}
    print(f"wrote {path}; verdict={report.verdict}; metrics={summary}")
    if report.verdict == "violation":
        return _EXIT_VIOLATION
    return _EXIT_OK


def _cmd_simulate(args) -> int:
    config = _load_config(args, "rate-mc")
    model = resolve_model(config.model)
    if model.debug_gauss:
        raise ConfigError("simulate requires a process model")
    n = config.n_grid[-1] if config.n_grid else 1024
    grid = _sim_grid_for(config, model, n)
    paths = sample_paths(model.process, grid, config.master_seed, range(config.R))
    base = f"{config.out_dir or '.'}/{config.name}-paths"
    dump_paths(paths, base, config.model, grid, config.master_seed)
    print(f"wrote {base}.bin and {base}.json "
          f"({paths.shape[0]} paths of length {paths.shape[1]})")
    return _EXIT_OK


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _cmd_table(args) -> int:
    if args.example is None and args.alpha_beta is None:
        raise _UsageError("table needs --example or --alpha-beta")
    if args.alpha_beta:
        ab = _frac(args.alpha_beta)
        w = theoretical_rate(ab, "wasserstein")
        k = theoretical_rate(ab, "kolmogorov")
        print(f"alpha*beta = {ab}")
        print(f"  wasserstein: {w.describe()}")
        print(f"  kolmogorov:  {k.describe()}")
        return _EXIT_OK
    if args.example == "ou":
        rates = corollary_rate(OuExample())
    elif args.example == "lfsn":
        rates = corollary_rate(LfsnExample(_frac(args.H), _frac(args.beta)))
    elif args.example == "fln":
        rates = corollary_rate(FlnExample(_frac(args.rho), _frac(args.eps or "1/100")))
    else:
        rates = corollary_rate(ArimaExample(_frac(args.d), _frac(args.beta)))
    print(f"example = {args.example}")
    print(f"  wasserstein: {rates.wasserstein.describe()}")
    print(f"  kolmogorov:  {rates.kolmogorov.describe()}")
    return _EXIT_OK


def _cmd_report(args) -> int:
    import csv as _csv
    from .stats import fit_rate
    groups = {}
    for path in args.csvs:
        with open(path) as fh:
            reader = _csv.DictReader(fh)
            expected = {"experiment", "n", "metric", "value", "stderr", "R",
                        "seed", "flag"}
            if set(reader.fieldnames or []) != expected:
                raise ConfigError(f"{path}: unexpected CSV header")
            for rec in reader:
                key = (rec["experiment"], rec["metric"])
                groups.setdefault(key, []).append(
                    (int(rec["n"]), float(rec["value"]), rec["flag"]))
    lines = ["experiment,metric,points,slope,stderr"]
    for (exp, metric), pts in sorted(groups.items()):
        clean = [(n, v) for n, v, flag in pts if not flag and v > 0]
        if len(clean) >= 3:
            ns = [n for n, _ in clean]
            if len(set(ns)) >= 3:
                fit = fit_rate(ns, [v for _, v in clean])
                lines.append(f"{exp},{metric},{len(clean)},"
                             f"{fit.slope!r},{fit.stderr!r}")
                continue
        lines.append(f"{exp},{metric},{len(clean)},,")
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return _EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    try:
        if args.command == "rates":
            return _cmd_experiment(args, "rate-mc")
        if args.command == "bounds":
            return _cmd_experiment(args, "bound-quadrature")
        if args.command == "rho":
            return _cmd_experiment(args, "rho-decay")
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "table":
            return _cmd_table(args)
        if args.command == "report":
            return _cmd_report(args)
        raise _UsageError(f"unknown command {args.command}")
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (AccuracyError, LevymaError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
