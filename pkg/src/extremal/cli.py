"""Command-line entry point: ``extremal {verify,optimize,identities,scan-g,dubickas}``.

Exit status: 0 all checks pass, 1 a mathematical check failed or a
counterexample candidate was found, 2 usage or input error.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import report
from .errors import InvalidParam
from .monotonicity import DEFAULT_A_MAX

log = logging.getLogger("extremal")


def build_parser():
    parser = argparse.ArgumentParser(prog="extremal", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--output", type=Path, default=None, help="report path (default stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        return p

    p = common(sub.add_parser("verify", help="check a configuration file"), seed=False)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--tol", type=float, default=report.INEQUALITY_SLACK)
    p.add_argument("--identities", action="store_true",
                   help="also check the disc identities on the points scaled by rho^-2")

    p = common(sub.add_parser("optimize", help="multi-start search for the maximiser"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--starts", type=int, default=50)
    p.add_argument("--tol", type=float, default=report.OPTIMIZER_TOL)

    p = common(sub.add_parser("identities", help="random sweep of the disc identities"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=report.IDENTITY_TOL)

    p = common(sub.add_parser("scan-g", help="sample the potential g and its derivative"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--a-max", type=float, default=DEFAULT_A_MAX)
    p.add_argument("--regular", action="store_true", help="use the regular n-gon instead of random angles")

    p = common(sub.add_parser("dubickas", help="search the chord symmetric functions"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    return parser


def run(args):
    if args.command == "verify":
        return report.cmd_verify(args.input, args.tol, identities=args.identities)
    if args.command == "optimize":
        return report.cmd_optimize(args.n, args.rho, args.starts, args.seed, args.tol)
    if args.command == "identities":
        return report.cmd_identities(args.n, args.trials, args.seed, args.tol)
    if args.command == "scan-g":
        return report.cmd_scan_g(args.n, args.seed, args.grid, args.a_max, args.regular)
    if args.command == "dubickas":
        return report.cmd_dubickas(args.n, args.degree, args.trials, args.seed)
    raise report.UsageError(f"unknown command {args.command!r}")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = run(args)
    except (report.UsageError, InvalidParam) as exc:
        print(f"extremal: error: {exc}", file=sys.stderr)
        return 2
    text = doc.to_json()
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
        log.info("wrote %s", args.output)
    return doc.exit_status


if __name__ == "__main__":
    sys.exit(main())
