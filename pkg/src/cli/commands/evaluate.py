"""Evaluate a solution from a phase file at a set of points."""
import argparse

import numpy as np
import pandas as pd

from config.settings import get_settings
from src.core.solve import BoundaryConditions, eval_solution_many, match_conditions, solve_bvp_with_phase
from src.data.phase_file import read_phase_file
from src.utils.constants import EXIT_OK
from src.utils.errors import InvalidParametersError
from src.utils.rng import uniform_points
from src.cli.output import write_frame


def register(parser: argparse.ArgumentParser):
    parser.add_argument('--phase', required=True, help='phase file')
    conditions = parser.add_mutually_exclusive_group(required=True)
    conditions.add_argument('--ivp', nargs=2, type=float, metavar=('Y', 'YPRIME'),
                            help='value and derivative at --at (default a)')
    conditions.add_argument('--bvp', nargs=6, type=float, metavar=('C1', 'C2', 'C3', 'C4', 'RA', 'RB'),
                            help='c1 y(a) + c2 y\'(a) = ra, c3 y(b) + c4 y\'(b) = rb')
    parser.add_argument('--at', type=float, help='matching point for --ivp')
    parser.add_argument('--points', help='CSV file with a column t')
    parser.add_argument('--random', type=int, help='number of seeded uniform points in [a, b]')
    parser.add_argument('--seed', type=int, help='seed for --random')
    parser.add_argument('--t', type=float, action='append', help='single point (repeatable)')
    parser.add_argument('--format', choices=('csv', 'json'), default='csv')
    parser.add_argument('-o', '--output', help='output file (default stdout)')


def collect_points(args: argparse.Namespace, a: float, b: float) -> np.ndarray:
    parts = []
    if args.points:
        frame = pd.read_csv(args.points)
        column = 't' if 't' in frame.columns else frame.columns[0]
        parts.append(frame[column].to_numpy(float))
    if args.random:
        seed = get_settings().DEFAULT_SEED if args.seed is None else args.seed
        parts.append(uniform_points(seed, args.random, a, b))
    if args.t:
        parts.append(np.asarray(args.t, dtype=float))
    if not parts:
        raise InvalidParametersError("no evaluation points: use --points, --random or --t")
    return np.sort(np.concatenate(parts), kind='stable')


def run(args: argparse.Namespace) -> int:
    phase, _ = read_phase_file(args.phase)
    if args.bvp:
        sol = solve_bvp_with_phase(phase, BoundaryConditions(*args.bvp))
    else:
        t0 = phase.a if args.at is None else args.at
        sol = match_conditions(phase, t0, *args.ivp)

    ts = collect_points(args, phase.a, phase.b)
    y, yp = eval_solution_many(sol, ts)
    write_frame(pd.DataFrame({'t': ts, 'y': y, 'yprime': yp}), args.output, args.format)
    return EXIT_OK
