"""
Nonoscillatory Phase Construction

Builds a phase function alpha for y'' + lambda^2 q(t) y = 0 on [a, b]:
1. Window the coefficient so that at a it equals 1, where the constant
   solution of the logarithm form of Kummer's equation is exact
2. March the windowed equation forward from (r, r') = (0, 0)
3. March the original equation backward from the value reached at b
4. alpha' = lambda exp(r/2), alpha'' = alpha' r'/2, alpha = integral of alpha'
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import time
import numpy as np
from scipy.special import erfc
from pydantic import BaseModel, ConfigDict, Field

from config.settings import get_solver_config
from src.core.chebcore import (
    PiecewiseChebyshev,
    evaluate_stack,
    partition_nodes,
    spectral_integration_matrix,
)
from src.core.stiffode import EvaluationCounter, IvpConfig, SystemFn, march
from src.utils.constants import DEFAULT_WINDOW_STEEPNESS
from src.utils.errors import (
    CoefficientNonpositiveError,
    InvalidIntervalError,
    InvalidParametersError,
    NonpositiveDerivativeError,
    NumericalFailure,
)
from src.utils.logging import get_logger
from src.utils.metrics import record_phase_built, record_rhs_evaluations, record_solver_failure
from src.utils.rng import uniform_points

logger = get_logger(__name__)

Coefficient = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CoefficientProblem:
    """y'' + lam^2 q(t) y = 0 on [a, b]; q must accept arrays."""
    q: Coefficient
    lam: float
    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise InvalidParametersError(f"lambda must be positive, got {self.lam}")
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise InvalidIntervalError(f"need finite a < b, got [{self.a}, {self.b}]")

    @property
    def label(self) -> str:
        return "custom"


class WindowSpec(BaseModel):
    """erf window; steepness below 13 leaves a visible tail at one end."""
    model_config = ConfigDict(frozen=True)

    steepness: float = Field(DEFAULT_WINDOW_STEEPNESS, ge=DEFAULT_WINDOW_STEEPNESS)

    @classmethod
    def from_settings(cls) -> "WindowSpec":
        return cls(**get_solver_config().get('window', {}))

    @staticmethod
    def midpoint(a: float, b: float) -> float:
        return 0.5 * (a + b)


def _window_pair(t, a: float, b: float, spec: WindowSpec) -> Tuple[np.ndarray, np.ndarray]:
    z = spec.steepness / (b - a) * (np.asarray(t, dtype=float) - WindowSpec.midpoint(a, b))
    return 0.5 * erfc(z), 0.5 * erfc(-z)


def window_function(t, a: float, b: float, spec: Optional[WindowSpec] = None):
    """psi(t) = (1 - erf(c (t - mid) / (b - a))) / 2, close to 1 at a and 0 at b."""
    psi, _ = _window_pair(t, a, b, spec or WindowSpec())
    return psi


def windowed_coefficient(problem: CoefficientProblem, spec: Optional[WindowSpec] = None) -> Coefficient:
    """q~ = psi + (1 - psi) q, with 1 - psi evaluated as its own erfc."""
    spec = spec or WindowSpec()

    def q_windowed(t):
        psi, psi_c = _window_pair(t, problem.a, problem.b, spec)
        return psi + psi_c * problem.q(t)

    return q_windowed


def kummer_system(q: Coefficient, lam: float, counter: Optional[EvaluationCounter] = None,
                  name: str = "kummer") -> SystemFn:
    """(r, rho)' = (rho, rho^2/4 - 4 lam^2 (exp(r) - q(t)))."""
    four_lam2 = 4.0 * lam * lam

    def rhs(t, y):
        r, rho = y[0], y[1]
        return np.array([rho, 0.25 * rho * rho - four_lam2 * (np.exp(r) - q(t))])

    return SystemFn(2, rhs, counter=counter, name=name)


def kummer_residual(r, rp, rpp, q_val, lam: float):
    """r'' - r'^2/4 + 4 lam^2 (exp(r) - q)."""
    return rpp - 0.25 * rp * rp + 4.0 * lam * lam * (np.exp(r) - q_val)


def positivity_guard(problem: CoefficientProblem, breakpoints, m: int,
                     random_points: Optional[int] = None, seed: Optional[int] = None):
    """Sample q at every node plus seeded random points per interval."""
    guard = get_solver_config().get('positivity_guard', {})
    random_points = guard.get('random_points_per_interval', 10) if random_points is None else random_points
    seed = guard.get('seed', 13) if seed is None else seed

    bp = np.asarray(breakpoints, dtype=float)
    samples = [partition_nodes(bp, m).ravel()]
    if random_points:
        for j in range(bp.size - 1):
            samples.append(uniform_points(seed + j, random_points, bp[j], bp[j + 1], sort=False))
    ts = np.concatenate(samples)
    qs = np.asarray(problem.q(ts), dtype=float)
    bad = ~(qs > 0)
    if bad.any():
        t_bad = float(ts[np.argmax(bad)])
        raise CoefficientNonpositiveError(f"coefficient is not positive at t={t_bad!r}")


def _check_partition(problem: CoefficientProblem, breakpoints) -> np.ndarray:
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
        raise InvalidIntervalError("breakpoints must be strictly increasing")
    if bp[0] != problem.a or bp[-1] != problem.b:
        raise InvalidIntervalError(
            f"partition [{bp[0]!r}, {bp[-1]!r}] does not match problem [{problem.a!r}, {problem.b!r}]")
    return bp


def solve_windowed(problem: CoefficientProblem, spec: Optional[WindowSpec], breakpoints, m: int,
                   cfg: Optional[IvpConfig] = None,
                   counter: Optional[EvaluationCounter] = None) -> Tuple[PiecewiseChebyshev, PiecewiseChebyshev]:
    """Forward march of the windowed equation from (r, r')(a) = (0, 0)."""
    bp = _check_partition(problem, breakpoints)
    q_tilde = windowed_coefficient(problem, spec)
    nodes = partition_nodes(bp, m)
    if not np.all(np.asarray(q_tilde(nodes)) > 0):
        raise CoefficientNonpositiveError("windowed coefficient is not positive at a grid node")
    f = kummer_system(q_tilde, problem.lam, counter, name="kummer[windowed]")
    r1, r1p = march(f, bp, m, (0.0, 0.0), "forward", cfg)
    return r1, r1p


def solve_original(problem: CoefficientProblem, breakpoints, m: int, terminal: Tuple[float, float],
                   cfg: Optional[IvpConfig] = None,
                   counter: Optional[EvaluationCounter] = None) -> Tuple[PiecewiseChebyshev, PiecewiseChebyshev]:
    """Backward march of the original equation from (r, r')(b) = terminal."""
    bp = _check_partition(problem, breakpoints)
    f = kummer_system(problem.q, problem.lam, counter, name="kummer")
    r2, r2p = march(f, bp, m, terminal, "backward", cfg)
    return r2, r2p


@dataclass(frozen=True)
class PhaseFunction:
    """alpha, alpha', alpha'' (and the r, r' they came from) on one partition.

    alpha(a) = 0 and alpha' > 0 at every node.
    """
    lam: float
    a: float
    b: float
    alpha: PiecewiseChebyshev = field(repr=False)
    alphap: PiecewiseChebyshev = field(repr=False)
    alphapp: PiecewiseChebyshev = field(repr=False)
    r: PiecewiseChebyshev = field(repr=False)
    rp: PiecewiseChebyshev = field(repr=False)

    @property
    def breakpoints(self) -> np.ndarray:
        return self.alpha.breakpoints

    @property
    def m(self) -> int:
        return self.alpha.m

    @property
    def n_intervals(self) -> int:
        return self.alpha.n_intervals

    @cached_property
    def _stack(self):
        return (self.alpha, self.alphap, self.alphapp)

    def eval(self, t: float) -> Tuple[float, float, float]:
        """(alpha, alpha', alpha'') at t."""
        out = self.eval_many(np.array([float(t)]))
        return float(out[0][0]), float(out[1][0]), float(out[2][0])

    def eval_many(self, ts) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        vals = evaluate_stack(self._stack, ts)
        return vals[0], vals[1], vals[2]

    def tables(self) -> dict:
        """Node tables keyed by function name."""
        return {
            'alpha': self.alpha.values,
            'alphap': self.alphap.values,
            'alphapp': self.alphapp.values,
            'r': self.r.values,
            'rp': self.rp.values,
        }

    @classmethod
    def from_tables(cls, lam: float, breakpoints, m: int, tables: dict) -> "PhaseFunction":
        bp = np.asarray(breakpoints, dtype=float)
        pcs = {name: PiecewiseChebyshev(bp, m, tables[name])
               for name in ('alpha', 'alphap', 'alphapp', 'r', 'rp')}
        return cls(lam=float(lam), a=float(bp[0]), b=float(bp[-1]), **pcs)


def assemble_phase(problem: CoefficientProblem, r2: PiecewiseChebyshev,
                   r2p: PiecewiseChebyshev) -> PhaseFunction:
    """alpha' = lam exp(r/2), alpha'' = alpha' r'/2, alpha by spectral integration."""
    m, bp = r2.m, r2.breakpoints
    with np.errstate(over='ignore', under='ignore'):
        alphap = problem.lam * np.exp(0.5 * r2.values)
    if not np.all(np.isfinite(alphap)) or np.any(alphap <= 0):
        raise NonpositiveDerivativeError("exp(r/2) is not a positive finite number at some node")
    alphapp = 0.5 * alphap * r2p.values

    S = spectral_integration_matrix(m).matrix
    local = (alphap @ S.T) * (0.5 * np.diff(bp))[:, None]
    offsets = np.concatenate([[0.0], np.cumsum(local[:, -1])[:-1]])
    alpha = local + offsets[:, None]

    return PhaseFunction(
        lam=problem.lam, a=problem.a, b=problem.b,
        alpha=PiecewiseChebyshev(bp, m, alpha),
        alphap=PiecewiseChebyshev(bp, m, alphap),
        alphapp=PiecewiseChebyshev(bp, m, alphapp),
        r=r2, rp=r2p,
    )


@dataclass(frozen=True)
class PhaseConstruction:
    """A phase function plus what it took to build it."""
    phase: PhaseFunction
    r1: PiecewiseChebyshev = field(repr=False)
    r1p: PiecewiseChebyshev = field(repr=False)
    rhs_evaluations: int
    seconds: float


def phase_solver_config(m: int) -> IvpConfig:
    """Solver settings for phase construction: the ``ivp`` defaults with the ``phase`` overrides."""
    return IvpConfig.from_settings(m=m, **get_solver_config().get('phase', {}))


def construct_phase(problem: CoefficientProblem, breakpoints, m: int,
                    cfg: Optional[IvpConfig] = None, spec: Optional[WindowSpec] = None,
                    guard: bool = True) -> PhaseConstruction:
    """
    Windowed forward solve, backward solve, assembly.

    Raises:
        CoefficientNonpositiveError: q <= 0 at a sampled point
        NumericalFailure: an interval solve failed (interval index attached)
    """
    cfg = cfg or phase_solver_config(m)
    spec = spec or WindowSpec.from_settings()
    bp = _check_partition(problem, breakpoints)
    counter = EvaluationCounter()
    start = time.perf_counter()
    try:
        if guard:
            positivity_guard(problem, bp, m)
        r1, r1p = solve_windowed(problem, spec, bp, m, cfg, counter)
        terminal = (r1.values[-1, -1], r1p.values[-1, -1])
        r2, r2p = solve_original(problem, bp, m, terminal, cfg, counter)
        phase = assemble_phase(problem, r2, r2p)
    except NumericalFailure as e:
        if isinstance(e, CoefficientNonpositiveError):
            record_solver_failure(type(e).__name__)
        logger.error("Phase construction failed", problem=problem.label, lam=problem.lam, error=str(e))
        raise
    seconds = time.perf_counter() - start

    record_rhs_evaluations(counter.count)
    record_phase_built(problem.label, seconds)
    logger.info("Phase constructed", problem=problem.label, lam=problem.lam,
                intervals=bp.size - 1, order=m, rhs_evaluations=counter.count,
                seconds=round(seconds, 6))
    return PhaseConstruction(phase=phase, r1=r1, r1p=r1p,
                             rhs_evaluations=counter.count, seconds=seconds)


def build_phase(problem: CoefficientProblem, breakpoints, m: int,
                cfg: Optional[IvpConfig] = None, spec: Optional[WindowSpec] = None) -> PhaseFunction:
    """Nonoscillatory phase function for ``problem`` on ``breakpoints``."""
    return construct_phase(problem, breakpoints, m, cfg, spec).phase


def phase_residual(phase: PhaseFunction, q: Coefficient, ts=None) -> float:
    """Largest |Kummer residual| of the stored r at ``ts`` (default: all nodes)."""
    if ts is None:
        ts = phase.r.nodes().ravel()
    rpp = phase.rp.derivative()
    r, rp, r2 = evaluate_stack([phase.r, phase.rp, rpp], ts)
    res = kummer_residual(r, rp, r2, np.asarray(q(np.asarray(ts, dtype=float))), phase.lam)
    return float(np.max(np.abs(res)))
