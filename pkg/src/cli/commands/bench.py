"""Run a benchmark suite and report timings and errors."""
import argparse
import sys

import pandas as pd

from src.cli.output import parse_number_list
from src.data.benchmarks import SUITES, default_parameters, run_suite
from src.data.specfun import PROLATE_TABLE
from src.utils.constants import EXIT_OK

COLUMNS = ['problem', 'parameter', 'partition', 'points', 'construction_seconds', 'eval_seconds',
           'max_error', 'rhs_evaluations', 'oracle_seconds', 'phase_difference', 'zero_count',
           'expected_zeros', 'residual', 'error']


def register(parser: argparse.ArgumentParser):
    parser.add_argument('--suite', required=True, choices=SUITES)
    parser.add_argument('--lambdas', help="e.g. '1e1,1e7' or '10..1000' (simple, chebyshev)")
    parser.add_argument('--orders', help="e.g. '1e2,1e4' (bessel, legendre)")
    parser.add_argument('--rows', help="prolate table rows by index, e.g. '0,1'")
    parser.add_argument('--points', type=int, help='evaluation points per row')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--repeats', type=int, help='evaluation passes averaged per row')
    parser.add_argument('--json', dest='json_path', help='also write JSON lines to this file')
    parser.add_argument('--format', choices=('text', 'jsonl'), default='text')


def parameters(args: argparse.Namespace) -> list:
    if args.suite == 'prolate':
        if args.rows:
            return [PROLATE_TABLE[int(i)] for i in parse_number_list(args.rows)]
        return default_parameters('prolate')
    given = args.lambdas if args.suite in ('simple', 'chebyshev') else args.orders
    return parse_number_list(given) if given else default_parameters(args.suite)


def render_table(reports) -> str:
    frame = pd.DataFrame([r.model_dump() for r in reports], columns=COLUMNS)
    frame = frame.dropna(axis=1, how='all')
    return frame.to_string(index=False)


def run(args: argparse.Namespace) -> int:
    reports = run_suite(args.suite, parameters(args), points=args.points, seed=args.seed,
                        repeats=args.repeats)
    lines = [r.model_dump_json() for r in reports]
    if args.json_path:
        with open(args.json_path, 'w') as f:
            f.write('\n'.join(lines) + '\n')
    if args.format == 'jsonl':
        sys.stdout.write('\n'.join(lines) + '\n')
    else:
        sys.stdout.write(render_table(reports) + '\n')
    return EXIT_OK
