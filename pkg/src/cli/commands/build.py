"""Build a phase function and write it to a phase file."""
import argparse
import sys

from src.core.kummer import construct_phase
from src.data.phase_file import write_phase_file
from src.data.specfun import PROBLEM_BUILDERS, build_problem
from src.utils.constants import EXIT_BAD_INPUT, EXIT_OK
from src.utils.logging import get_logger

logger = get_logger(__name__)


def register(parser: argparse.ArgumentParser):
    parser.add_argument('--problem', required=True, choices=sorted(PROBLEM_BUILDERS))
    parser.add_argument('--lambda', dest='lam', type=float, help='frequency (simple, chebyshev, table)')
    parser.add_argument('--nu', type=float, help='order (bessel, legendre)')
    parser.add_argument('--c', type=float, help='bandlimit (prolate)')
    parser.add_argument('--chi', type=float, help='eigenvalue (prolate)')
    parser.add_argument('--coefficient-file', help='CSV with columns t, q (table)')
    parser.add_argument('--intervals', type=int, help='equispaced intervals (simple, table)')
    parser.add_argument('--order', type=int, help='grid order m')
    parser.add_argument('-o', '--output', required=True, help='phase file path')


def problem_arguments(args: argparse.Namespace) -> dict:
    """Builder keyword arguments from parsed flags; raises ValueError on missing ones."""
    name = args.problem
    if name in ('simple', 'chebyshev', 'table'):
        if args.lam is None:
            raise ValueError(f"--lambda is required for {name}")
        if not args.lam > 0:
            raise ValueError("lambda must be positive")
        kwargs = {'lam': args.lam}
    elif name in ('bessel', 'legendre'):
        if args.nu is None:
            raise ValueError(f"--nu is required for {name}")
        kwargs = {'nu': args.nu}
    else:
        if args.c is None or args.chi is None:
            raise ValueError("--c and --chi are required for prolate")
        kwargs = {'c': args.c, 'chi': args.chi}

    if name == 'table':
        if not args.coefficient_file:
            raise ValueError("--coefficient-file is required for table")
        kwargs['path'] = args.coefficient_file
    if args.intervals is not None:
        if name not in ('simple', 'table'):
            raise ValueError(f"--intervals does not apply to {name}")
        kwargs['intervals'] = args.intervals
    if args.order is not None:
        kwargs['m'] = args.order
    return kwargs


def run(args: argparse.Namespace) -> int:
    try:
        kwargs = problem_arguments(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    spec = build_problem(args.problem, **kwargs)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    write_phase_file(args.output, built.phase,
                     problem={'name': spec.name, 'params': spec.params, 'args': kwargs})
    logger.info("Build complete", problem=spec.name, output=args.output,
                partition=spec.describe_partition(), seconds=round(built.seconds, 6))
    return EXIT_OK
