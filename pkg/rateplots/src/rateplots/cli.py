"""rateplots command line: render rate and rho figures from harness CSVs."""

from __future__ import annotations

import argparse
import sys

from .figures import plot_rates, plot_rho
from .frame import MalformedReport


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rateplots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("rates", help="distance-vs-n panels")
    pr.add_argument("csv")
    pr.add_argument("out", help="output figure path (svg/pdf/png)")
    pr.add_argument("--ref-slope", type=float, default=-0.5)
    ph = sub.add_parser("rho", help="overlap-integral decay panel")
    ph.add_argument("csv")
    ph.add_argument("out")
    ph.add_argument("--alpha-beta", type=float)
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 1
    try:
        if args.command == "rates":
            fitted = plot_rates(args.csv, args.out,
                                ref_slopes={"dK": args.ref_slope,
                                            "dW": args.ref_slope})
        else:
            fitted = plot_rho(args.csv, args.out, alpha_beta=args.alpha_beta)
    except MalformedReport as exc:
        print(f"malformed report: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}; fitted slopes: "
          + (", ".join(f"{k}={v:.3f}" for k, v in sorted(fitted.items()))
             or "none"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
