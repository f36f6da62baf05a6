"""Command line entry point.

    lregen list
    lregen run <scenario|config.ini> [...] [--dt --horizon --beta --gamma --alpha
                                          --theta --noise-snr --seed --drem --out]
    lregen check <scenario|config.ini> [...]

Exit status: 0 success, 1 usage or configuration error, 2 invariant violation.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from ..ode import IntegrationError
from ..regen import ConfigurationError
from ..signals import ThetaProfile, parse_alpha
from .config import DremSettings, ScenarioConfig
from .runner import run_scenario
from .scenarios import get_scenario, list_scenarios

log = logging.getLogger("lregen")

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_overrides(p):
    p.add_argument("targets", nargs="+", help="builtin scenario name or path to a config file")
    p.add_argument("--dt", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", help="1 | const:c | exp:scale,rate | feedback:scale,rate,k")
    p.add_argument("--theta", help="-5 or piecewise -5@0,-4@10")
    p.add_argument("--noise-snr", type=float, help="uniform sample-and-hold noise at this SNR (dB)")
    p.add_argument("--seed", type=int)
    p.add_argument("--drem", help="vector front-end, e.g. delay:0,1.571 or filter:1,2")


def build_parser():
    parser = _Parser(prog="lregen", description="Regressor generator scenario runner")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="list builtin scenarios")
    run = sub.add_parser("run", help="run scenarios and write CSV traces")
    _add_overrides(run)
    run.add_argument("--out", help="CSV path (single target only)")
    run.add_argument("--summary", help="write the JSON summary here instead of next to the CSV")
    check = sub.add_parser("check", help="run the invariant suite only, no CSV")
    _add_overrides(check)
    return parser


def resolve(target: str, args) -> ScenarioConfig:
    if os.path.exists(target):
        with open(target) as fh:
            config = ScenarioConfig.from_ini(fh.read())
    else:
        config = get_scenario(target)
    return config.override(
        dt=args.dt, horizon=args.horizon, beta=args.beta, gamma=args.gamma, seed=args.seed,
        alpha=parse_alpha(args.alpha) if args.alpha else None,
        theta=ThetaProfile.parse(args.theta) if args.theta else None,
        noise_snr_db=args.noise_snr,
        drem=DremSettings.parse(args.drem) if args.drem else None,
        out=getattr(args, "out", None),
    )


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        for name in list_scenarios():
            print(name)
        return EXIT_OK
    if getattr(args, "out", None) and len(args.targets) > 1:
        print("lregen: --out needs a single target", file=sys.stderr)
        return EXIT_USAGE
    status = EXIT_OK
    for target in args.targets:
        try:
            config = resolve(target, args)
            result = run_scenario(config, write_csv=args.command == "run")
        except (ConfigurationError, ValueError, KeyError, NotImplementedError) as exc:
            print(f"lregen: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except IntegrationError as exc:
            print(f"lregen: {config.name}: {exc}", file=sys.stderr)
            return EXIT_INVARIANT
        summary = result.summary
        if args.command == "run":
            path = args.summary or os.path.splitext(result.csv_path)[0] + ".summary.json"
            with open(path, "w") as fh:
                fh.write(summary.to_json() + "\n")
            log.info("wrote %s and %s", result.csv_path, path)
        print(summary.to_json())
        for inv in summary.invariants:
            if not inv["passed"]:
                print(f"lregen: {config.name}: invariant {inv['name']} violated (worst {inv['worst']:.3g})",
                      file=sys.stderr)
        if not summary.passed:
            status = EXIT_INVARIANT
    return status


if __name__ == "__main__":
    sys.exit(main())
