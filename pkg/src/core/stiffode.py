"""
Stiff Collocation Solver

Solves y' = f(t, y) on one Chebyshev grid by spectral deferred correction:
- implicit-Euler predictor across the nodes
- node-wise implicit correction sweeps with a lower-triangular preconditioner
- damped Newton with a finite-difference Jacobian for every implicit substep
- Newton on the full collocation system until its steps reach round-off

``march`` chains interval solves across a partition, forward or backward.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.settings import get_solver_config
from src.core.chebcore import (
    ChebGrid,
    PiecewiseChebyshev,
    cheb_grid,
    reference_nodes,
    spectral_integration_matrix,
)
from src.utils.constants import EPS, FD_STEP, QUADRATIC_TAIL, STAGNATION_RATIO, SWEEP_STALL_RATIO
from src.utils.errors import (
    InvalidIntervalError,
    NewtonFailureError,
    NoConvergenceError,
    NonFiniteRhsError,
    NumericalFailure,
)
from src.utils.logging import get_logger
from src.utils.metrics import record_solver_failure, record_sweeps

logger = get_logger(__name__)

Direction = Literal["forward", "backward"]


class IvpConfig(BaseModel):
    """Tolerances and limits for the collocation solver.

    With ``fixed_work`` every interval gets the same schedule: the predictor
    and each sweep take ``fixed_newton_steps`` Newton iterations per node,
    ``fixed_sweeps`` sweeps run, and the collocation Newton takes at least
    ``fixed_polish_steps`` iterations. Only an interval whose collocation
    Newton has not reached round-off by then does further work.
    """
    model_config = ConfigDict(frozen=True)

    m: int = Field(15, ge=1)
    max_sweeps: Optional[int] = Field(None, ge=1)
    newton_tol: float = Field(1e-14, gt=0)
    residual_tol: float = Field(1e-12, gt=0)
    max_newton_iters: int = Field(50, ge=1)
    max_damping_halvings: int = Field(20, ge=0)
    qdelta: Literal["BE", "LU"] = "LU"
    polish: bool = True
    fixed_work: bool = False
    fixed_newton_steps: int = Field(6, ge=1)
    fixed_sweeps: int = Field(2, ge=1)
    fixed_polish_steps: int = Field(6, ge=1)

    @field_validator('residual_tol')
    @classmethod
    def _above_machine_precision(cls, v: float) -> float:
        if v < EPS:
            raise ValueError(f"residual_tol must be at least machine epsilon, got {v}")
        return v

    def sweep_limit(self, m: int) -> int:
        """Sweep cap for a grid of order m (2m unless set)."""
        return 2 * m if self.max_sweeps is None else self.max_sweeps

    @classmethod
    def from_settings(cls, **overrides) -> "IvpConfig":
        """Defaults from config/solver.yaml, then keyword overrides."""
        raw = dict(get_solver_config().get('ivp', {}))
        if 'order' in raw:
            raw['m'] = raw.pop('order')
        raw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**raw)


class EvaluationCounter:
    """Shared tally of right-hand-side evaluations."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


class SystemFn:
    """Right-hand side f(t, y) of a d-dimensional first-order system."""

    def __init__(self, dim: int, rhs: Callable[[float, np.ndarray], np.ndarray],
                 counter: Optional[EvaluationCounter] = None, name: str = "system"):
        if dim < 1:
            raise ValueError(f"system dimension must be positive, got {dim}")
        self.dim = dim
        self.rhs = rhs
        self.counter = counter
        self.name = name
        self.evaluations = 0

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        if self.counter is not None:
            self.counter.count += 1
        with np.errstate(over='ignore', invalid='ignore'):
            return np.asarray(self.rhs(t, y), dtype=float)

    def time_reversed(self) -> "SystemFn":
        """g(s, y) = -f(-s, y); evaluations are counted on this system."""
        return SystemFn(self.dim, lambda s, y: -self(-s, y), name=f"{self.name}[reversed]")


@dataclass(frozen=True)
class IntervalSolution:
    grid: ChebGrid
    values: np.ndarray = field(repr=False)   # (d, m+1)
    residual: float
    sweeps: int
    newton_steps: int = 0
    polished: bool = False

    @property
    def terminal(self) -> np.ndarray:
        return self.values[:, -1]


@lru_cache(maxsize=None)
def qdelta_matrix(m: int, kind: str) -> np.ndarray:
    """Lower-triangular approximation of the integration matrix.

    Row and column 0 are zero; "BE" is the implicit-Euler matrix and "LU" is
    the transposed upper factor of S[1:, 1:]^T.
    """
    S = spectral_integration_matrix(m).matrix
    QD = np.zeros((m + 1, m + 1))
    if kind == "BE":
        dx = np.diff(reference_nodes(m))
        for j in range(1, m + 1):
            QD[j, 1:j + 1] = dx[:j]
    elif kind == "LU":
        _, _, U = scipy.linalg.lu(S[1:, 1:].T)
        QD[1:, 1:] = U.T
    else:
        raise ValueError(f"unknown qdelta kind {kind!r}")
    QD.setflags(write=False)
    return QD


def _norm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


def _scaled(dY: np.ndarray, Y: np.ndarray) -> float:
    """Largest per-component ratio max|dY_i| / (1 + max|Y_i|); rows are components."""
    d = Y.shape[0]
    num = np.abs(dY).reshape(d, -1).max(axis=1)
    den = 1.0 + np.abs(Y).reshape(d, -1).max(axis=1)
    return float(np.max(num / den))


def _newton_done(size: float, prev: float, cfg: IvpConfig) -> bool:
    """The step just taken left the iterate at round-off."""
    if size <= cfg.newton_tol or prev <= QUADRATIC_TAIL:
        return True
    return size <= QUADRATIC_TAIL and size > STAGNATION_RATIO * prev


def _fd_jacobian(f: SystemFn, t: float, y: np.ndarray, fy: np.ndarray) -> np.ndarray:
    d = y.size
    J = np.empty((d, d))
    for k in range(d):
        delta = FD_STEP * (1.0 + abs(y[k]))
        yp = y.copy()
        yp[k] += delta
        fp = f(t, yp)
        if not np.all(np.isfinite(fp)):
            yp[k] = y[k] - delta
            fp = f(t, yp)
            delta = -delta
            if not np.all(np.isfinite(fp)):
                raise NonFiniteRhsError(f"non-finite right-hand side near t={t!r}")
        J[:, k] = (fp - fy) / delta
    return J


def _linear_solve(M: np.ndarray, b: np.ndarray, where: str) -> np.ndarray:
    try:
        x = np.linalg.solve(M, b)
    except np.linalg.LinAlgError as e:
        raise NewtonFailureError(f"singular Newton matrix {where}") from e
    if not np.all(np.isfinite(x)):
        raise NewtonFailureError(f"non-finite Newton step {where}")
    return x


def _implicit_solve(f: SystemFn, t: float, rhs: np.ndarray, c: float, guess: np.ndarray,
                    cfg: IvpConfig, steps: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Solve y - c f(t, y) = rhs by damped Newton; returns (y, f(t, y)).

    A trial step is kept when the simplified Newton correction at the trial
    point is smaller than the step itself. With ``steps`` set exactly that
    many iterations are taken; otherwise iteration stops at round-off.
    """
    y = np.array(guess, dtype=float)
    fy = f(t, y)
    if not np.all(np.isfinite(fy)):
        raise NonFiniteRhsError(f"non-finite right-hand side at t={t!r}")
    g = y - c * fy - rhs
    eye = np.eye(y.size)
    where = f"at t={t!r}"
    prev = np.inf

    for _ in range(steps or cfg.max_newton_iters):
        M = eye - c * _fd_jacobian(f, t, y, fy)
        dy = _linear_solve(M, -g, where)
        size = _scaled(dy, y)

        step = 1.0
        for _ in range(cfg.max_damping_halvings + 1):
            y_try = y + step * dy
            f_try = f(t, y_try)
            if np.all(np.isfinite(f_try)):
                g_try = y_try - c * f_try - rhs
                if size <= QUADRATIC_TAIL:
                    break
                if _scaled(_linear_solve(M, -g_try, where), y_try) < size:
                    break
            step *= 0.5
        else:
            raise NewtonFailureError(f"damping exhausted {where}")

        y, fy, g = y_try, f_try, g_try
        if steps is None and _newton_done(size, prev, cfg):
            return y, fy
        prev = size

    if steps is not None:
        return y, fy
    raise NewtonFailureError(f"Newton did not converge {where}")


def collocation_residual(Y: np.ndarray, F: np.ndarray, h: float, S: np.ndarray) -> np.ndarray:
    """y0 + h S F - Y, column j for node j."""
    return Y[:, :1] + h * (F @ S.T) - Y


def _relative(R: np.ndarray, Y: np.ndarray) -> float:
    return _norm(R) / (1.0 + _norm(Y))


def _node_solve(f: SystemFn, t: float, rhs: np.ndarray, c: float, Y: np.ndarray, F: np.ndarray,
                j: int, cfg: IvpConfig, steps: Optional[int]):
    """Implicit substep for node j, in place.

    When the collocation Newton will follow, a failed substep keeps the
    node's current value and leaves the repair to it.
    """
    try:
        Y[:, j], F[:, j] = _implicit_solve(f, t, rhs, c, Y[:, j], cfg, steps)
    except NewtonFailureError as e:
        if not cfg.polish:
            raise
        logger.debug("Substep left to collocation Newton", t=float(t), error=str(e))
        F[:, j] = f(t, Y[:, j])
        if not np.all(np.isfinite(F[:, j])):
            raise NonFiniteRhsError(f"non-finite right-hand side at t={t!r}") from e


def _sweep(f: SystemFn, t: np.ndarray, Y: np.ndarray, F: np.ndarray, h: float,
           S: np.ndarray, QD: np.ndarray, cfg: IvpConfig, steps: Optional[int]):
    """One correction sweep, in place."""
    m = Y.shape[1] - 1
    explicit = Y[:, :1] + h * (F @ (S - QD).T)
    for j in range(1, m + 1):
        rhs = explicit[:, j] + h * (F[:, :j] @ QD[j, :j])
        _node_solve(f, t[j], rhs, h * QD[j, j], Y, F, j, cfg, steps)


def _polish(f: SystemFn, t: np.ndarray, Y: np.ndarray, F: np.ndarray, h: float,
            S: np.ndarray, cfg: IvpConfig, min_steps: int) -> Tuple[int, bool]:
    """Damped Newton on all m*d collocation unknowns, in place.

    Takes at least ``min_steps`` iterations, then stops once a step leaves
    the iterate at round-off. Returns (iterations, reached round-off).
    """
    d, m1 = Y.shape
    m = m1 - 1
    Sm = S[1:, 1:]
    eye = np.eye(d * m)
    R = collocation_residual(Y, F, h, S)
    prev = np.inf
    done = False
    where = "in collocation Newton"

    for it in range(max(min_steps, cfg.max_newton_iters)):
        Js = np.stack([_fd_jacobian(f, t[j], Y[:, j], F[:, j]) for j in range(1, m + 1)])
        M = eye - h * np.einsum('jl,lik->jilk', Sm, Js).reshape(d * m, d * m)
        dY = _linear_solve(M, R[:, 1:].T.ravel(), where).reshape(m, d).T
        size = _scaled(dY, Y[:, 1:])

        step = 1.0
        for _ in range(cfg.max_damping_halvings + 1):
            Y_try = Y.copy()
            Y_try[:, 1:] += step * dY
            F_try = F.copy()
            for j in range(1, m + 1):
                F_try[:, j] = f(t[j], Y_try[:, j])
            if np.all(np.isfinite(F_try)):
                R_try = collocation_residual(Y_try, F_try, h, S)
                if size <= QUADRATIC_TAIL:
                    break
                bar = _linear_solve(M, R_try[:, 1:].T.ravel(), where).reshape(m, d).T
                if _scaled(bar, Y_try[:, 1:]) < size:
                    break
            step *= 0.5
        else:
            raise NewtonFailureError("damping exhausted in collocation Newton")

        Y[:], F[:], R = Y_try, F_try, R_try
        done = done or _newton_done(size, prev, cfg)
        prev = size
        if done and it + 1 >= min_steps:
            return it + 1, True
    return max(min_steps, cfg.max_newton_iters), done


def solve_ivp_interval(f: SystemFn, grid: ChebGrid, y0: Sequence[float],
                       cfg: Optional[IvpConfig] = None) -> IntervalSolution:
    """
    Solve y' = f(t, y), y(grid.a) = y0 on one grid.

    Sweeps stop at cfg.residual_tol, when they stall, or at the sweep limit;
    Newton on the full collocation system then runs until its steps reach
    round-off. A solution is accepted when the relative collocation residual
    is within cfg.residual_tol or that Newton iteration has converged (the
    residual of a stiff system cannot drop below eps * h * |J| * |Y|).

    Raises:
        NoConvergenceError: not accepted after sweeps and collocation Newton
        NewtonFailureError: an implicit substep or the collocation Newton failed
        NonFiniteRhsError: f returned inf or nan at an accepted state
    """
    cfg = cfg or IvpConfig()
    m, h, t = grid.m, grid.half_width, grid.nodes
    S = spectral_integration_matrix(m).matrix
    QD = qdelta_matrix(m, cfg.qdelta)
    node_steps = cfg.fixed_newton_steps if cfg.fixed_work else None

    y0 = np.asarray(y0, dtype=float).reshape(-1)
    if y0.size != f.dim:
        raise ValueError(f"initial value has {y0.size} components, system has {f.dim}")
    Y = np.empty((f.dim, m + 1))
    F = np.empty((f.dim, m + 1))
    Y[:, 0] = y0
    F[:, 0] = f(t[0], y0)
    if not np.all(np.isfinite(F[:, 0])):
        raise NonFiniteRhsError(f"non-finite right-hand side at t={t[0]!r}")

    # implicit Euler predictor
    x = reference_nodes(m)
    for j in range(1, m + 1):
        Y[:, j] = Y[:, j - 1]
        _node_solve(f, t[j], Y[:, j - 1].copy(), h * (x[j] - x[j - 1]), Y, F, j, cfg, node_steps)

    res = _relative(collocation_residual(Y, F, h, S), Y)
    limit = cfg.sweep_limit(m)
    sweeps = 0
    if cfg.fixed_work:
        for _ in range(min(cfg.fixed_sweeps, limit)):
            _sweep(f, t, Y, F, h, S, QD, cfg, node_steps)
            sweeps += 1
        res = _relative(collocation_residual(Y, F, h, S), Y)
    else:
        prev = np.inf
        while res > cfg.residual_tol and sweeps < limit:
            if sweeps >= 3 and res > SWEEP_STALL_RATIO * prev:
                break
            _sweep(f, t, Y, F, h, S, QD, cfg, None)
            sweeps += 1
            prev, res = res, _relative(collocation_residual(Y, F, h, S), Y)

    newton_steps, converged, polished = 0, False, False
    if cfg.polish and res > 0.0:
        min_steps = cfg.fixed_polish_steps if cfg.fixed_work else 1
        newton_steps, converged = _polish(f, t, Y, F, h, S, cfg, min_steps)
        res = _relative(collocation_residual(Y, F, h, S), Y)
        polished = True

    if res > cfg.residual_tol and not converged:
        raise NoConvergenceError(
            f"collocation residual {res:.3e} above tolerance after {sweeps} sweeps"
            f" and {newton_steps} Newton steps", residual=res)

    return IntervalSolution(grid=grid, values=Y, residual=res, sweeps=sweeps,
                            newton_steps=newton_steps, polished=polished)



def march(f: SystemFn, breakpoints, m: int, y_start: Sequence[float],
          direction: Direction = "forward", cfg: Optional[IvpConfig] = None) -> List[PiecewiseChebyshev]:
    """
    Solve across every interval of a partition.

    Forward starts from y(xi_0) = y_start; backward starts from
    y(xi_n) = y_start and runs the time-reversed system s = -t.
    The value carried into each interval is the previous interval's
    terminal node value, so shared breakpoints agree exactly.

    Returns one PiecewiseChebyshev per solution component.
    """
    cfg = cfg or IvpConfig(m=m)
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
        raise InvalidIntervalError("breakpoints must be strictly increasing")
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    n = bp.size - 1
    values = np.empty((f.dim, n, m + 1))
    y = np.asarray(y_start, dtype=float).reshape(-1)
    system = f if direction == "forward" else f.time_reversed()
    order = range(n) if direction == "forward" else range(n - 1, -1, -1)
    total_sweeps = 0
    worst = 0.0

    for j in order:
        if direction == "forward":
            grid = cheb_grid(m, bp[j], bp[j + 1])
        else:
            grid = cheb_grid(m, -bp[j + 1], -bp[j])
        try:
            sol = solve_ivp_interval(system, grid, y, cfg)
        except NumericalFailure as e:
            record_solver_failure(type(e).__name__)
            logger.warning("Interval solve failed", interval=j, direction=direction, error=str(e))
            raise e.with_interval(j)
        values[:, j, :] = sol.values if direction == "forward" else sol.values[:, ::-1]
        y = sol.terminal
        total_sweeps += sol.sweeps
        worst = max(worst, sol.residual)

    record_sweeps(total_sweeps)
    logger.debug("March complete", system=f.name, direction=direction, intervals=n,
                 sweeps=total_sweeps, max_residual=worst)
    return [PiecewiseChebyshev(bp, m, values[k]) for k in range(f.dim)]
