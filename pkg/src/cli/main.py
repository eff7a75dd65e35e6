"""
Command-line entry point.

    python -m src.cli build --problem simple --lambda 1e3 -o phase.pfn
    python -m src.cli eval --phase phase.pfn --ivp 0 1000 --random 1000 --seed 7
    python -m src.cli bench --suite bessel --orders 1e2,1e4
    python -m src.cli plotdata --phase phase.pfn --what r

Exit codes: 0 ok, 2 bad input, 3 numerical failure.  Logs go to stderr.
"""
import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.cli.commands import bench, build, evaluate, plotdata
from src.utils.constants import EXIT_BAD_INPUT, EXIT_NUMERICAL_FAILURE
from src.utils.errors import NumericalFailure, PhaseFunctionError
from src.utils.logging import get_logger

logger = get_logger(__name__)

COMMANDS = {
    'build': build,
    'eval': evaluate,
    'bench': bench,
    'plotdata': plotdata,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='phasefn',
        description="Nonoscillatory phase functions for y'' + lambda^2 q(t) y = 0",
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, module in COMMANDS.items():
        module.register(subparsers.add_parser(name, help=module.__doc__.strip().splitlines()[0]))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command].run(args)
    except NumericalFailure as e:
        logger.error("Numerical failure", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (PhaseFunctionError, ValidationError, ValueError, OSError) as e:
        logger.error("Bad input", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == '__main__':
    sys.exit(main())
