"""
Command-line entry point: ``pita exact|euler-study|parareal|optimize-q``.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import describe_schema, parse_config
from .constants import EXIT_OK
from .exceptions import PitaError
from .harness import run

logger = logging.getLogger(__name__)

COMMAND_HELP = {
    'exact': "matrix-exponential solution at the coarse instants (exact.csv)",
    'euler-study': "explicit Euler at subdivided steps (psi_<delta>.csv, omega_err.csv, omega_acc.csv)",
    'parareal': "parareal, calibration and final acceleration (omega_err_para.csv, solution.csv, report.txt)",
    'optimize-q': "calibration of q only (calibration.csv, objective_scan.csv)",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog='pita',
        description="Parareal with epsilon-algorithm acceleration for linear systems.",
        epilog="configuration keys:\n" + describe_schema(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND', required=True)
    for name, text in COMMAND_HELP.items():
        sub = subparsers.add_parser(name, help=text, description=text,
                                    epilog="configuration keys:\n" + describe_schema(),
                                    formatter_class=argparse.RawDescriptionHelpFormatter)
        sub.add_argument('--config', metavar='FILE', help="YAML file of dotted keys")
        sub.add_argument('--preset', metavar='NAME', help="built-in experiment setup")
        sub.add_argument('--set', metavar='KEY=VALUE', action='append', default=[],
                         dest='assignments', help="override one key (repeatable)")
        sub.add_argument('--threads', type=int, metavar='N', help="worker threads")
        sub.add_argument('--seed', type=int, metavar='S', help="annealing seed")
        sub.add_argument('--out', metavar='DIR', help="output directory")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument('-v', '--verbose', action='store_true', help="debug logging")
        verbosity.add_argument('-q', '--quiet', action='store_true', help="warnings only")
    return parser


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        config = parse_config(args.config, args.preset, args.assignments,
                              seed=args.seed, threads=args.threads, out=args.out)
        if args.command == 'euler-study' and config.mode != 'euler-study':
            config = config.with_mode('euler-study')
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            run(args.command, config, executor)
    except PitaError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
