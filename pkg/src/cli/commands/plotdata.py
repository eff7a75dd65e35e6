"""Emit sampled curves from a phase file as CSV for external plotting."""
import argparse

import numpy as np
import pandas as pd

from src.core.kummer import construct_phase, windowed_coefficient
from src.data.phase_file import read_phase_file
from src.data.specfun import build_problem
from src.utils.constants import EXIT_OK
from src.utils.errors import InvalidParametersError
from src.cli.output import write_frame

WHAT = ('r', 'alpha', 'alpha-ct', 'q', 'r1')


def register(parser: argparse.ArgumentParser):
    parser.add_argument('--phase', required=True, help='phase file')
    parser.add_argument('--what', choices=WHAT, default='r')
    parser.add_argument('--samples', type=int, default=1000)
    parser.add_argument('--c', type=float, help='slope for alpha-ct (default lambda)')
    parser.add_argument('-o', '--output', help='output file (default stdout)')


def _problem_from_sidecar(sidecar):
    problem = (sidecar or {}).get('problem', {})
    if 'args' not in problem:
        raise InvalidParametersError("phase file sidecar does not name a rebuildable problem")
    return build_problem(problem['name'], **problem['args'])


def run(args: argparse.Namespace) -> int:
    if args.samples < 2:
        raise InvalidParametersError("--samples must be at least 2")
    phase, sidecar = read_phase_file(args.phase)
    ts = np.linspace(phase.a, phase.b, args.samples)
    ts[0], ts[-1] = phase.a, phase.b

    if args.what == 'r':
        frame = pd.DataFrame({'t': ts, 'r': phase.r.eval_many(ts)})
    elif args.what == 'alpha':
        frame = pd.DataFrame({'t': ts, 'alpha': phase.alpha.eval_many(ts)})
    elif args.what == 'alpha-ct':
        c = phase.lam if args.c is None else args.c
        frame = pd.DataFrame({'t': ts, 'alpha_minus_ct': phase.alpha.eval_many(ts) - c * ts})
    else:
        spec = _problem_from_sidecar(sidecar)
        if args.what == 'q':
            frame = pd.DataFrame({'t': ts, 'q': spec.q(ts), 'q_windowed': windowed_coefficient(spec)(ts)})
        else:
            built = construct_phase(spec, spec.breakpoints, spec.m)
            frame = pd.DataFrame({'t': ts, 'r1': built.r1.eval_many(ts)})

    write_frame(frame, args.output)
    return EXIT_OK
