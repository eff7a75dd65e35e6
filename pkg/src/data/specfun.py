"""
Special-function test problems and independent reference values.

Each builder returns a ProblemSpec: the coefficient problem plus the
partition and order it is meant to be solved on.  The reference functions
(Miller recurrence for J_n, three-term recurrence for P_n, a direct
collocation solve for the simple problem) never go through a phase function.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import math
import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from config.settings import get_problem_config
from src.core.chebcore import equispaced_breakpoints, graded_left, graded_mesh, partition_nodes
from src.core.kummer import CoefficientProblem, PhaseFunction, construct_phase, phase_residual
from src.core.solve import Solution, eval_solution_many, match_conditions
from src.core.stiffode import IvpConfig, SystemFn, march
from src.utils.constants import BESSEL_START_PAD, BESSEL_START_SCALE, RECURRENCE_RESCALE
from src.utils.errors import (
    CoefficientNonpositiveError,
    InvalidOrderError,
    InvalidParametersError,
    OutOfDomainError,
)
from src.utils.logging import get_logger

logger = get_logger(__name__)

# (c, n, chi) with chi the n-th prolate eigenvalue for bandlimit c
PROLATE_TABLE = (
    (1.0e4, 12904, 2.18416195669669e+08),
    (1.0e5, 63769, 1.00060408908491e+10),
    (1.0e5, 95653, 1.44996988449419e+10),
)


@dataclass(frozen=True, eq=False)
class ProblemSpec(CoefficientProblem):
    """A coefficient problem with its recommended partition and order."""
    name: str
    params: Dict[str, float]
    breakpoints: np.ndarray = field(repr=False)
    m: int

    def __post_init__(self):
        super().__post_init__()
        bp = np.asarray(self.breakpoints, dtype=float)
        bp.setflags(write=False)
        object.__setattr__(self, 'breakpoints', bp)
        qs = np.asarray(self.q(partition_nodes(bp, self.m)))
        if not np.all(qs > 0):
            raise CoefficientNonpositiveError(f"{self.name} coefficient is not positive on its partition")

    @property
    def label(self) -> str:
        return self.name

    @property
    def n_intervals(self) -> int:
        return self.breakpoints.size - 1

    def describe_partition(self) -> str:
        return f"{self.n_intervals}x{self.m + 1}"


def _config(name: str) -> dict:
    return get_problem_config().get(name, {})


def _one_minus_t2(t):
    t = np.asarray(t, dtype=float)
    return (1.0 - t) * (1.0 + t)


# ---------- problem builders ----------

def simple_problem(lam: float, intervals: Optional[int] = None, m: Optional[int] = None) -> ProblemSpec:
    """q(t) = 1 - t^2 cos(3t) on [-1, 1]."""
    cfg = _config('simple')
    a, b = cfg.get('interval', [-1.0, 1.0])
    intervals = intervals or cfg.get('intervals', 10)
    m = m or cfg.get('order', 15)

    def q(t):
        t = np.asarray(t, dtype=float)
        return 1.0 - t * t * np.cos(3.0 * t)

    return ProblemSpec(q=q, lam=float(lam), a=float(a), b=float(b), name='simple',
                       params={'lambda': float(lam)},
                       breakpoints=equispaced_breakpoints(a, b, intervals), m=m)


def chebyshev_problem(lam: float, m: Optional[int] = None) -> ProblemSpec:
    """lam^2 q = (2 + t^2 + 4 lam^2 (1 - t^2)) / (4 (1 - t^2)^2) on +-(1 - 2^-20)."""
    if not (np.isfinite(lam) and lam > 0):
        raise InvalidParametersError(f"lambda must be positive, got {lam}")
    cfg = _config('chebyshev')
    exponent = cfg.get('endpoint_exponent', 20)
    m = m or cfg.get('order', 15)
    four_lam2 = 4.0 * lam * lam

    def q(t):
        t = np.asarray(t, dtype=float)
        w = _one_minus_t2(t)
        return (2.0 + t * t + four_lam2 * w) / (four_lam2 * w * w)

    bp = graded_mesh(exponent // 2, exponent)
    return ProblemSpec(q=q, lam=float(lam), a=float(bp[0]), b=float(bp[-1]), name='chebyshev',
                       params={'lambda': float(lam)}, breakpoints=bp, m=m)


def bessel_turning_point(nu: float) -> float:
    return 0.5 * math.sqrt(4.0 * nu * nu - 1.0)


def bessel_problem(nu: float, m: Optional[int] = None) -> ProblemSpec:
    """psi = sqrt(t) J_nu(t) solves psi'' + (1 - (nu^2 - 1/4)/t^2) psi = 0.

    Domain starts a factor (1 + nu^(-2/3)) above the turning point and ends
    at 10 nu; breakpoints are graded toward the left end.
    """
    cfg = _config('bessel')
    if not (np.isfinite(nu) and nu >= cfg.get('min_order', 10)):
        raise InvalidOrderError(f"Bessel order must be at least {cfg.get('min_order', 10)}, got {nu}")
    nu = float(nu)
    m = m or cfg.get('order', 15)
    a = (1.0 + nu ** (-2.0 / 3.0)) * bessel_turning_point(nu)
    b = cfg.get('right_endpoint_factor', 10.0) * nu
    c = (nu * nu - 0.25)

    def q(t):
        t = np.asarray(t, dtype=float)
        return (1.0 - c / (t * t)) / (nu * nu)

    bp = graded_left(a, b, 2.0 * a, cfg.get('graded_intervals', 12), cfg.get('tail_intervals', 18))
    return ProblemSpec(q=q, lam=nu, a=float(bp[0]), b=float(bp[-1]), name='bessel',
                       params={'nu': nu}, breakpoints=bp, m=m)


def legendre_problem(nu: float, m: Optional[int] = None) -> ProblemSpec:
    """psi = sqrt(1 - t^2) P_nu(t): lam^2 q = 1/(1 - t^2)^2 + nu(nu + 1)/(1 - t^2)."""
    if not (np.isfinite(nu) and nu > 0):
        raise InvalidOrderError(f"Legendre order must be positive, got {nu}")
    cfg = _config('legendre')
    nu = float(nu)
    m = m or cfg.get('order', 15)
    nu2, nn1 = nu * nu, nu * (nu + 1.0)

    def q(t):
        w = _one_minus_t2(t)
        return (1.0 / (w * w) + nn1 / w) / nu2

    bp = graded_mesh(cfg.get('mesh_levels', 50))
    return ProblemSpec(q=q, lam=nu, a=float(bp[0]), b=float(bp[-1]), name='legendre',
                       params={'nu': nu}, breakpoints=bp, m=m)


def prolate_problem(c: float, chi: float, m: Optional[int] = None) -> ProblemSpec:
    """lam^2 q = 1/(1 - t^2)^2 + (chi - c^2 t^2)/(1 - t^2) with lam = c; needs chi > c^2.

    This is the equation for sqrt(1 - t^2) times the prolate function.
    """
    if not (np.isfinite(c) and c > 0):
        raise InvalidParametersError(f"bandlimit c must be positive, got {c}")
    if not (np.isfinite(chi) and chi > c * c):
        raise InvalidParametersError(f"need chi > c^2, got chi={chi}, c^2={c * c}")
    cfg = _config('prolate')
    c, chi = float(c), float(chi)
    m = m or cfg.get('order', 15)
    c2 = c * c

    def q(t):
        t = np.asarray(t, dtype=float)
        w = _one_minus_t2(t)
        return (1.0 / (w * w) + (chi - c2 * t * t) / w) / c2

    bp = graded_mesh(cfg.get('mesh_levels', 50))
    return ProblemSpec(q=q, lam=c, a=float(bp[0]), b=float(bp[-1]), name='prolate',
                       params={'c': c, 'chi': chi}, breakpoints=bp, m=m)


def tabulated_problem(path: str, lam: float, intervals: int = 10, m: int = 15) -> ProblemSpec:
    """Coefficient read from a CSV with columns t, q and interpolated by a cubic spline."""
    frame = pd.read_csv(path)
    if not {'t', 'q'} <= set(frame.columns):
        raise InvalidParametersError(f"{path}: expected columns 't' and 'q'")
    frame = frame.sort_values('t')
    spline = CubicSpline(frame['t'].to_numpy(float), frame['q'].to_numpy(float))
    a, b = float(frame['t'].iloc[0]), float(frame['t'].iloc[-1])

    def q(t):
        return spline(np.asarray(t, dtype=float))

    return ProblemSpec(q=q, lam=float(lam), a=a, b=b, name='table',
                       params={'lambda': float(lam), 'source': str(path)},
                       breakpoints=equispaced_breakpoints(a, b, intervals), m=m)


PROBLEM_BUILDERS: Dict[str, Callable[..., ProblemSpec]] = {
    'simple': simple_problem,
    'chebyshev': chebyshev_problem,
    'bessel': bessel_problem,
    'legendre': legendre_problem,
    'prolate': prolate_problem,
    'table': tabulated_problem,
}


def build_problem(name: str, **params) -> ProblemSpec:
    """Problem by registry name; ``params`` go to its builder."""
    try:
        builder = PROBLEM_BUILDERS[name]
    except KeyError:
        raise InvalidParametersError(f"unknown problem {name!r}") from None
    return builder(**params)


# ---------- reference values ----------

def bessel_triple(n: int, t) -> tuple:
    """(J_{n-1}, J_n, J_{n+1}) at t by Miller's downward recurrence.

    Starts at max(n, t) + 40 + ceil(10 max(n, t)^(1/3)), normalises with
    J_0 + 2 sum J_2k = 1 and rescales whenever a value passes 1e250.
    """
    if int(n) != n or n < 0:
        raise InvalidOrderError(f"Bessel order must be a nonnegative integer, got {n}")
    n = int(n)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise OutOfDomainError("Bessel reference needs finite t >= 0")

    zero = t == 0
    ts = np.where(zero, 1.0, t)
    scale = max(float(n), float(ts.max()))
    top = int(math.ceil(scale)) + BESSEL_START_PAD + int(math.ceil(BESSEL_START_SCALE * scale ** (1.0 / 3.0)))

    nxt = np.zeros_like(ts)
    cur = np.ones_like(ts)
    total = np.zeros_like(ts)
    out = np.zeros((3,) + ts.shape)   # J_{n-1}, J_n, J_{n+1}
    for k in range(top, 0, -1):
        if n - 1 <= k <= n + 1:
            out[k - n + 1] = cur
        if k % 2 == 0:
            total += 2.0 * cur
        nxt, cur = cur, (2.0 * k / ts) * cur - nxt
        big = np.abs(cur) > RECURRENCE_RESCALE
        if big.any():
            s = np.where(big, 1.0 / RECURRENCE_RESCALE, 1.0)
            cur, nxt, total, out = cur * s, nxt * s, total * s, out * s
    total += cur
    if n <= 1:
        out[1 - n] = cur      # J_0 lands in slot n-1 (n = 1) or n (n = 0)
    if n == 0:
        out[0] = -out[2]      # J_{-1} = -J_1
    out = out / total

    if zero.any():
        # J_k(0) is 1 for k = 0 and 0 otherwise
        out[:, zero] = 0.0
        if n <= 1:
            out[1 - n, zero] = 1.0
    return out[0], out[1], out[2]


def bessel_reference(n: int, t):
    """J_n(t) for integer n >= 0; scalar in, scalar out."""
    scalar = np.ndim(t) == 0
    value = bessel_triple(n, t)[1]
    return float(value[0]) if scalar else value


def bessel_derivative_reference(n: int, t):
    jm1, _, jp1 = bessel_triple(n, t)
    return 0.5 * (jm1 - jp1)


def legendre_reference(n: int, t):
    """P_n(t) by (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}."""
    if int(n) != n or n < 0:
        raise InvalidOrderError(f"Legendre degree must be a nonnegative integer, got {n}")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.abs(t) > 1):
        raise OutOfDomainError("Legendre reference needs |t| <= 1")
    prev, cur = np.ones_like(t), t.copy()
    if n == 0:
        cur = prev
    for k in range(1, int(n)):
        prev, cur = cur, ((2 * k + 1) * t * cur - k * prev) / (k + 1)
    return float(cur[0]) if scalar else cur


def simple_reference(lam: float, y_a: float, yp_a: float, points,
                     cfg: Optional[IvpConfig] = None) -> np.ndarray:
    """y at ``points`` from a direct collocation solve of y'' = -lam^2 q y.

    Uses (y, y'/lam) as unknowns on about 10 lam nodes over [-1, 1].
    """
    settings = _config('simple_reference')
    if lam > settings.get('max_lambda', 1000.0):
        raise InvalidParametersError(f"direct reference limited to lambda <= {settings.get('max_lambda')}")
    spec = simple_problem(lam)
    m = spec.m
    factor = settings.get('nodes_per_wavelength_factor', 10)
    n = max(spec.n_intervals, int(math.ceil(factor * lam / (m + 1))))
    bp = equispaced_breakpoints(spec.a, spec.b, n)

    def rhs(t, y):
        return np.array([lam * y[1], -lam * spec.q(t) * y[0]])

    cfg = cfg or IvpConfig.from_settings(m=m, residual_tol=1e-13)
    y, _ = march(SystemFn(2, rhs, name="oscillatory"), bp, m, (y_a, yp_a / lam), "forward", cfg)
    return y.eval_many(points)


# ---------- evaluation through the phase ----------

def bessel_solution(nu: int, phase: PhaseFunction) -> Solution:
    """Pin sqrt(t) J_nu(t) at t* = b (= 10 nu) by reference value and derivative."""
    t_star = phase.b
    jm1, j, jp1 = (float(v[0]) for v in bessel_triple(nu, t_star))
    root = math.sqrt(t_star)
    return match_conditions(phase, t_star, root * j, j / (2.0 * root) + root * 0.5 * (jm1 - jp1))


def bessel_eval_via_phase(nu: int, points, phase: Optional[PhaseFunction] = None) -> np.ndarray:
    """J_nu at ``points`` (inside the bessel_problem domain)."""
    if phase is None:
        spec = bessel_problem(nu)
        phase = construct_phase(spec, spec.breakpoints, spec.m).phase
    pts = np.asarray(points, dtype=float)
    y, _ = eval_solution_many(bessel_solution(nu, phase), pts)
    return y / np.sqrt(pts)


def legendre_solution(nu: int, phase: PhaseFunction) -> Solution:
    """Pin sqrt(1 - t^2) P_nu(t) at t* = 0 by P_n(0) and P'_n(0) = n P_{n-1}(0)."""
    p0 = legendre_reference(nu, 0.0)
    dp0 = nu * legendre_reference(nu - 1, 0.0)
    return match_conditions(phase, 0.0, p0, dp0)


def legendre_eval_via_phase(nu: int, points, phase: Optional[PhaseFunction] = None) -> np.ndarray:
    """P_nu at ``points`` inside the legendre_problem domain."""
    if phase is None:
        spec = legendre_problem(nu)
        phase = construct_phase(spec, spec.breakpoints, spec.m).phase
    pts = np.asarray(points, dtype=float)
    y, _ = eval_solution_many(legendre_solution(nu, phase), pts)
    return y / np.sqrt(_one_minus_t2(pts))


@dataclass(frozen=True)
class ProlateReport:
    c: float
    chi: float
    phase: PhaseFunction = field(repr=False)
    residual: float
    max_coefficient: float
    zero_count: float
    seconds: float


def prolate_phase_report(c: float, chi: float) -> ProlateReport:
    """Phase, Kummer residual and the zero-count estimate alpha(b)/pi."""
    spec = prolate_problem(c, chi)
    built = construct_phase(spec, spec.breakpoints, spec.m)
    phase = built.phase
    nodes = phase.r.nodes().ravel()
    report = ProlateReport(
        c=float(c), chi=float(chi), phase=phase,
        residual=phase_residual(phase, spec.q, nodes),
        max_coefficient=float(np.max(spec.lam ** 2 * spec.q(nodes))),
        zero_count=float(phase.alpha.values[-1, -1] / math.pi),
        seconds=built.seconds,
    )
    logger.info("Prolate phase report", c=c, chi=chi, zero_count=report.zero_count,
                residual=report.residual)
    return report


def chebyshev_exact_phase(lam: float, a: float, t):
    return lam * (np.arccos(a) - np.arccos(np.asarray(t, dtype=float)))


def chebyshev_phase_difference(lam: float, phase: Optional[PhaseFunction] = None) -> float:
    """max |alpha - lam (arccos a - arccos t)| / max |lam (arccos a - arccos t)| over all nodes."""
    if phase is None:
        spec = chebyshev_problem(lam)
        phase = construct_phase(spec, spec.breakpoints, spec.m).phase
    nodes = phase.alpha.nodes()
    exact = chebyshev_exact_phase(lam, phase.a, nodes)
    return float(np.max(np.abs(phase.alpha.values - exact)) / np.max(np.abs(exact)))
