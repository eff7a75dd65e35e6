"""
Solutions from a phase function.

With u = cos(alpha)/sqrt(alpha') and v = sin(alpha)/sqrt(alpha') every
solution of y'' + lam^2 q y = 0 is y = d1 u + d2 v; boundary or initial
conditions fix (d1, d2).
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.core.kummer import CoefficientProblem, PhaseFunction, build_phase
from src.core.stiffode import IvpConfig
from src.utils.constants import SINGULAR_DET_TOL
from src.utils.errors import DegeneratePhaseError, InvalidParametersError, SingularSystemError
from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class BoundaryConditions:
    """c1 y(a) + c2 y'(a) = rhs_a,  c3 y(b) + c4 y'(b) = rhs_b."""
    c1: float
    c2: float
    c3: float
    c4: float
    rhs_a: float
    rhs_b: float

    def __post_init__(self):
        values = (self.c1, self.c2, self.c3, self.c4, self.rhs_a, self.rhs_b)
        if not all(np.isfinite(v) for v in values):
            raise InvalidParametersError("boundary data must be finite")
        if self.c1 == 0 and self.c2 == 0:
            raise InvalidParametersError("left condition has c1 = c2 = 0")
        if self.c3 == 0 and self.c4 == 0:
            raise InvalidParametersError("right condition has c3 = c4 = 0")


@dataclass(frozen=True)
class Solution:
    """y = d1 u + d2 v for the basis of ``phase``."""
    d1: float
    d2: float
    phase: PhaseFunction

    def __post_init__(self):
        if not (np.isfinite(self.d1) and np.isfinite(self.d2)):
            raise SingularSystemError("solution coefficients are not finite")


def _basis(alpha, alphap, alphapp):
    if not np.all(np.asarray(alphap) > 0):
        raise DegeneratePhaseError("phase derivative is not positive")
    s = np.sqrt(alphap)
    cs, sn = np.cos(alpha), np.sin(alpha)
    k = alphapp / (2.0 * alphap * s)
    return cs / s, sn / s, -s * sn - k * cs, s * cs - k * sn


def basis_eval(phase: PhaseFunction, t: float) -> Tuple[float, float, float, float]:
    """(u, v, u', v') at t; the Wronskian u v' - u' v is 1."""
    u, v, up, vp = _basis(*phase.eval(t))
    return float(u), float(v), float(up), float(vp)


def basis_eval_many(phase: PhaseFunction, ts) -> Tuple[np.ndarray, ...]:
    return _basis(*phase.eval_many(ts))


def _solve_2x2(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination with full pivoting."""
    i, j = np.unravel_index(np.argmax(np.abs(A)), A.shape)
    pivot = A[i, j]
    k, l = 1 - i, 1 - j
    factor = A[k, j] / pivot
    second = A[k, l] - factor * A[i, l]
    x = np.empty(2)
    x[l] = (rhs[k] - factor * rhs[i]) / second
    x[j] = (rhs[i] - A[i, l] * x[l]) / pivot
    return x


def solve_bvp_with_phase(phase: PhaseFunction, bc: BoundaryConditions) -> Solution:
    """Fix (d1, d2) from two-point boundary conditions."""
    ua, va, upa, vpa = basis_eval(phase, phase.a)
    ub, vb, upb, vpb = basis_eval(phase, phase.b)
    A = np.array([
        [bc.c1 * ua + bc.c2 * upa, bc.c1 * va + bc.c2 * vpa],
        [bc.c3 * ub + bc.c4 * upb, bc.c3 * vb + bc.c4 * vpb],
    ])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    scale = np.linalg.norm(A[0]) * np.linalg.norm(A[1])
    if not abs(det) > SINGULAR_DET_TOL * scale:
        logger.warning("Singular boundary system", det=float(det), scale=float(scale))
        raise SingularSystemError(f"singular boundary system (det={det:.3e}, scale={scale:.3e})")
    d1, d2 = _solve_2x2(A, np.array([bc.rhs_a, bc.rhs_b]))
    return Solution(d1=float(d1), d2=float(d2), phase=phase)


def solve_bvp(problem: CoefficientProblem, bc: BoundaryConditions, breakpoints, m: int,
              cfg: Optional[IvpConfig] = None) -> Solution:
    """Build the phase function, then fix (d1, d2) from the boundary conditions."""
    return solve_bvp_with_phase(build_phase(problem, breakpoints, m, cfg), bc)


def match_conditions(phase: PhaseFunction, t0: float, y: float, yp: float) -> Solution:
    """(d1, d2) with y(t0) = y, y'(t0) = yp; t0 may be any point of [a, b]."""
    if not (np.isfinite(y) and np.isfinite(yp)):
        raise InvalidParametersError("initial values must be finite")
    u, v, up, vp = basis_eval(phase, t0)
    w = u * vp - up * v
    return Solution(d1=(y * vp - yp * v) / w, d2=(u * yp - up * y) / w, phase=phase)


def solve_ivp(problem: CoefficientProblem, y_a: float, yp_a: float, breakpoints, m: int,
              cfg: Optional[IvpConfig] = None) -> Solution:
    """Solution with y(a) = y_a, y'(a) = yp_a."""
    phase = build_phase(problem, breakpoints, m, cfg)
    return match_conditions(phase, problem.a, y_a, yp_a)


def eval_solution(sol: Solution, t: float) -> Tuple[float, float]:
    """(y(t), y'(t))."""
    u, v, up, vp = basis_eval(sol.phase, t)
    return sol.d1 * u + sol.d2 * v, sol.d1 * up + sol.d2 * vp


def eval_solution_many(sol: Solution, ts) -> Tuple[np.ndarray, np.ndarray]:
    u, v, up, vp = basis_eval_many(sol.phase, ts)
    return sol.d1 * u + sol.d2 * v, sol.d1 * up + sol.d2 * vp
