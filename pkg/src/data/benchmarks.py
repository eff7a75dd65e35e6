"""
Benchmark suites.

Each row builds one phase function (timed end to end), evaluates at N
seeded random points (timed, averaged over repeated passes) and compares
against the suite's independent reference.
"""
from typing import Callable, Dict, Iterable, List, Optional

import math
import time
import numpy as np
from pydantic import BaseModel, Field

from config.settings import get_bench_config, get_problem_config
from src.core.kummer import construct_phase, phase_residual
from src.core.solve import eval_solution_many, match_conditions
from src.data import specfun
from src.utils.errors import PhaseFunctionError
from src.utils.logging import get_logger
from src.utils.rng import uniform_points

logger = get_logger(__name__)

SUITES = ('simple', 'chebyshev', 'bessel', 'legendre', 'prolate')


class BenchReport(BaseModel):
    """One benchmark row; missing measurements are None."""
    problem: str
    parameter: float
    partition: str = ""
    points: int = Field(0, ge=0)
    construction_seconds: Optional[float] = Field(None, ge=0)
    eval_seconds: Optional[float] = Field(None, ge=0)
    max_error: Optional[float] = Field(None, ge=0)
    rhs_evaluations: Optional[int] = Field(None, ge=0)
    oracle_seconds: Optional[float] = Field(None, ge=0)
    phase_difference: Optional[float] = Field(None, ge=0)
    zero_count: Optional[float] = None
    expected_zeros: Optional[int] = None
    residual: Optional[float] = Field(None, ge=0)
    error: Optional[str] = None


def _time_per_point(fn: Callable[[], object], points: int, repeats: int) -> float:
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / (repeats * max(points, 1))


def _max_abs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def _simple_row(lam: float, n_points: int, seed: int, repeats: int) -> BenchReport:
    spec = specfun.simple_problem(lam)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    sol = match_conditions(built.phase, spec.a, 0.0, lam)
    pts = uniform_points(seed, n_points, spec.a, spec.b)
    eval_seconds = _time_per_point(lambda: eval_solution_many(sol, pts), n_points, repeats)

    error = None
    if lam <= get_problem_config().get('simple_reference', {}).get('max_lambda', 1000.0):
        y, _ = eval_solution_many(sol, pts)
        error = _max_abs(y, specfun.simple_reference(lam, 0.0, lam, pts))
    return BenchReport(problem='simple', parameter=lam, partition=spec.describe_partition(),
                       points=n_points, construction_seconds=built.seconds,
                       eval_seconds=eval_seconds, max_error=error,
                       rhs_evaluations=built.rhs_evaluations)


def _chebyshev_row(lam: float, n_points: int, seed: int, repeats: int) -> BenchReport:
    spec = specfun.chebyshev_problem(lam)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    pts = uniform_points(seed, n_points, spec.a, spec.b)
    eval_seconds = _time_per_point(lambda: built.phase.eval_many(pts), n_points, repeats)
    alpha, _, _ = built.phase.eval_many(pts)
    exact = specfun.chebyshev_exact_phase(lam, spec.a, pts)
    return BenchReport(problem='chebyshev', parameter=lam, partition=spec.describe_partition(),
                       points=n_points, construction_seconds=built.seconds,
                       eval_seconds=eval_seconds,
                       max_error=_max_abs(alpha, exact) / float(np.max(np.abs(exact))),
                       rhs_evaluations=built.rhs_evaluations,
                       phase_difference=specfun.chebyshev_phase_difference(lam, built.phase))


def _bessel_row(nu: float, n_points: int, seed: int, repeats: int) -> BenchReport:
    n = int(round(nu))
    spec = specfun.bessel_problem(n)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    sol = specfun.bessel_solution(n, built.phase)
    pts = uniform_points(seed, n_points, spec.a, spec.b)
    eval_seconds = _time_per_point(lambda: eval_solution_many(sol, pts), n_points, repeats)

    start = time.perf_counter()
    reference = specfun.bessel_reference(n, pts)
    oracle_seconds = (time.perf_counter() - start) / n_points
    y, _ = eval_solution_many(sol, pts)
    return BenchReport(problem='bessel', parameter=n, partition=spec.describe_partition(),
                       points=n_points, construction_seconds=built.seconds,
                       eval_seconds=eval_seconds, max_error=_max_abs(y / np.sqrt(pts), reference),
                       rhs_evaluations=built.rhs_evaluations, oracle_seconds=oracle_seconds)


def _legendre_row(nu: float, n_points: int, seed: int, repeats: int) -> BenchReport:
    n = int(round(nu))
    spec = specfun.legendre_problem(n)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    sol = specfun.legendre_solution(n, built.phase)
    pts = uniform_points(seed, n_points, -0.9, 0.9)
    eval_seconds = _time_per_point(lambda: eval_solution_many(sol, pts), n_points, repeats)

    start = time.perf_counter()
    reference = specfun.legendre_reference(n, pts)
    oracle_seconds = (time.perf_counter() - start) / n_points
    y, _ = eval_solution_many(sol, pts)
    values = y / np.sqrt((1.0 - pts) * (1.0 + pts))
    return BenchReport(problem='legendre', parameter=n, partition=spec.describe_partition(),
                       points=n_points, construction_seconds=built.seconds,
                       eval_seconds=eval_seconds, max_error=_max_abs(values, reference),
                       rhs_evaluations=built.rhs_evaluations, oracle_seconds=oracle_seconds)


def _prolate_row(row: tuple, n_points: int, seed: int, repeats: int) -> BenchReport:
    c, n, chi = row
    spec = specfun.prolate_problem(c, chi)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    phase = built.phase
    pts = uniform_points(seed, n_points, spec.a, spec.b)
    eval_seconds = _time_per_point(lambda: phase.eval_many(pts), n_points, repeats)
    nodes = phase.r.nodes().ravel()
    return BenchReport(problem='prolate', parameter=c, partition=spec.describe_partition(),
                       points=n_points, construction_seconds=built.seconds,
                       eval_seconds=eval_seconds, rhs_evaluations=built.rhs_evaluations,
                       zero_count=float(phase.alpha.values[-1, -1] / math.pi), expected_zeros=int(n),
                       residual=phase_residual(phase, spec.q, nodes))


RUNNERS: Dict[str, Callable[..., BenchReport]] = {
    'simple': _simple_row,
    'chebyshev': _chebyshev_row,
    'bessel': _bessel_row,
    'legendre': _legendre_row,
    'prolate': _prolate_row,
}


def default_parameters(suite: str) -> list:
    """Parameter list for a suite from config/bench.yaml."""
    entry = get_bench_config()['suites'][suite]
    if suite == 'prolate':
        return [(r['c'], r['n'], r['chi']) for r in entry['rows']]
    return list(entry.get('lambdas', entry.get('orders', [])))


def run_suite(suite: str, parameters: Optional[Iterable] = None, points: Optional[int] = None,
              seed: Optional[int] = None, repeats: Optional[int] = None) -> List[BenchReport]:
    """Run one suite; a failing row is reported with its error and the suite continues."""
    if suite not in RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    cfg = get_bench_config()
    points = cfg.get('eval_points', 1000) if points is None else points
    seed = cfg.get('seed', 20160101) if seed is None else seed
    repeats = cfg.get('timing_repeats', 100) if repeats is None else repeats
    parameters = default_parameters(suite) if parameters is None else list(parameters)

    reports = []
    for param in parameters:
        try:
            report = RUNNERS[suite](param, points, seed, repeats)
        except (PhaseFunctionError, ValueError) as e:
            logger.error("Benchmark row failed", suite=suite, parameter=str(param), error=str(e))
            value = param[0] if isinstance(param, tuple) else param
            report = BenchReport(problem=suite, parameter=float(value), points=points,
                                 error=f"{type(e).__name__}: {e}")
        logger.info("Benchmark row", suite=suite, parameter=report.parameter,
                    construction_seconds=report.construction_seconds, max_error=report.max_error)
        reports.append(report)
    return reports
