"""
Chebyshev grids, barycentric interpolation and spectral integration.

Every function handled by the solver is stored as its values on (m+1)-point
Chebyshev extreme-point grids, one grid per subinterval of a partition
a = xi_0 < xi_1 < ... < xi_n = b.  Nodes are kept in ascending order so that
the last node of interval j is the first node of interval j+1.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import math
import numpy as np
from numpy.polynomial import chebyshev as cheb

from src.utils.constants import EPS, NODE_SNAP_FACTOR, SEAM_TOLERANCE_FACTOR
from src.utils.errors import InvalidIntervalError, InvalidOrderError, OutOfDomainError


def _check_order(m: int):
    if int(m) != m or m < 1:
        raise InvalidOrderError(f"grid order must be a positive integer, got {m}")


def _check_interval(a: float, b: float):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidIntervalError(f"interval endpoints must be finite, got [{a}, {b}]")
    if not a < b:
        raise InvalidIntervalError(f"interval must satisfy a < b, got [{a}, {b}]")


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=None)
def reference_nodes(m: int) -> np.ndarray:
    """Ascending (m+1)-point Chebyshev extreme points on [-1, 1].

    Computed as sin(pi (2j - m) / (2m)) and symmetrised so that
    x[m - j] == -x[j] holds exactly.
    """
    _check_order(m)
    j = np.arange(m + 1)
    x = np.sin(np.pi * (2 * j - m) / (2 * m))
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    return _readonly(x)


@lru_cache(maxsize=None)
def barycentric_weights(m: int) -> np.ndarray:
    """(-1)^j with the two endpoint weights halved."""
    _check_order(m)
    w = np.where(np.arange(m + 1) % 2 == 0, 1.0, -1.0)
    w[0] *= 0.5
    w[-1] *= 0.5
    return _readonly(w)


@dataclass(frozen=True)
class ChebGrid:
    """(m+1)-point Chebyshev grid on [a, b], nodes ascending."""
    m: int
    a: float
    b: float
    nodes: np.ndarray = field(repr=False)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)


def cheb_grid(m: int, a: float, b: float) -> ChebGrid:
    """Build the Chebyshev grid of order m on [a, b]; endpoints are exact."""
    _check_order(m)
    a, b = float(a), float(b)
    _check_interval(a, b)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * reference_nodes(m)
    nodes[0], nodes[-1] = a, b
    return ChebGrid(m=int(m), a=a, b=b, nodes=_readonly(nodes))


def _barycentric_kernel(t: np.ndarray, nodes: np.ndarray, values: np.ndarray,
                        widths: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Guarded barycentric formula, one row of nodes per evaluation point.

    t: (N,), nodes: (N, m+1), widths: (N,), values: (..., N, m+1).
    Returns (..., N).
    """
    diff = t[:, None] - nodes
    with np.errstate(divide='ignore', invalid='ignore'):
        tmp = weights / diff
        out = np.sum(tmp * values, axis=-1) / np.sum(tmp, axis=-1)
    snap = np.abs(diff) <= NODE_SNAP_FACTOR * EPS * widths[:, None]
    hit = np.nonzero(snap.any(axis=1))[0]
    if hit.size:
        k = np.argmax(snap[hit], axis=1)
        out[..., hit] = values[..., hit, k]
    return out


def barycentric_eval(grid: ChebGrid, values, x: float) -> float:
    """Value at x of the degree-m interpolant of ``values`` on ``grid``.

    Points within 4 eps (b - a) of a node return that node's value exactly.
    """
    x = float(x)
    if not grid.a <= x <= grid.b:
        raise OutOfDomainError(f"x={x!r} outside [{grid.a!r}, {grid.b!r}]")
    values = np.asarray(values, dtype=float)
    out = _barycentric_kernel(
        np.array([x]), grid.nodes[None, :], values[..., None, :],
        np.array([grid.b - grid.a]), barycentric_weights(grid.m),
    )
    return out[..., 0] if out.ndim > 1 else float(out[0])


def barycentric_eval_many(grid: ChebGrid, values, xs) -> np.ndarray:
    """Vectorised ``barycentric_eval`` over an array of points."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if xs.size and (xs.min() < grid.a or xs.max() > grid.b):
        raise OutOfDomainError(f"points outside [{grid.a!r}, {grid.b!r}]")
    values = np.asarray(values, dtype=float)
    n = xs.size
    return _barycentric_kernel(
        xs, np.broadcast_to(grid.nodes, (n, grid.m + 1)),
        np.broadcast_to(values[..., None, :], values.shape[:-1] + (n, grid.m + 1)),
        np.full(n, grid.b - grid.a), barycentric_weights(grid.m),
    )


@dataclass(frozen=True)
class SpectralIntegrationMatrix:
    """S_m on the ascending reference grid of [-1, 1].

    (S_m @ f)[j] is the integral from -1 to x_j of the interpolant of f;
    multiply by (b - a)/2 for a grid on [a, b].
    """
    m: int
    matrix: np.ndarray = field(repr=False)

    def apply(self, values, half_width: float = 1.0) -> np.ndarray:
        return half_width * (np.asarray(values, dtype=float) @ self.matrix.T)


@lru_cache(maxsize=None)
def _values_to_coefficients(m: int) -> np.ndarray:
    # discrete cosine transform of type I on the extreme points
    theta = np.pi * (m - np.arange(m + 1)) / m
    k = np.arange(m + 1)
    T = np.cos(np.outer(k, theta))
    halve = np.ones(m + 1)
    halve[0] = halve[-1] = 0.5
    return (2.0 / m) * halve[:, None] * T * halve[None, :]


@lru_cache(maxsize=None)
def spectral_integration_matrix(m: int) -> SpectralIntegrationMatrix:
    """Values -> Chebyshev coefficients -> integrated coefficients -> values."""
    _check_order(m)
    x = reference_nodes(m)
    integrate = cheb.chebint(np.eye(m + 1), lbnd=-1, axis=0)
    S = cheb.chebvander(x, m + 1) @ integrate @ _values_to_coefficients(m)
    S[0, :] = 0.0
    return SpectralIntegrationMatrix(m=m, matrix=_readonly(S))


@lru_cache(maxsize=None)
def spectral_differentiation_matrix(m: int) -> np.ndarray:
    """Chebyshev differentiation matrix on the ascending reference grid."""
    _check_order(m)
    x = reference_nodes(m)
    c = np.ones(m + 1)
    c[0] = c[-1] = 2.0
    c *= np.where(np.arange(m + 1) % 2 == 0, 1.0, -1.0)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(m + 1))
    D -= np.diag(D.sum(axis=1))
    return _readonly(D)


@dataclass(frozen=True)
class PiecewiseChebyshev:
    """Function on [xi_0, xi_n] stored by node values, one row per subinterval."""
    breakpoints: np.ndarray
    m: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_order(self.m)
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise InvalidIntervalError("need at least two breakpoints")
        if not np.all(np.isfinite(bp)) or np.any(np.diff(bp) <= 0):
            raise InvalidIntervalError("breakpoints must be finite and strictly increasing")
        if vals.shape != (bp.size - 1, self.m + 1):
            raise ValueError(
                f"values must have shape {(bp.size - 1, self.m + 1)}, got {vals.shape}"
            )
        object.__setattr__(self, 'breakpoints', _readonly(bp))
        object.__setattr__(self, 'values', _readonly(vals))

    @classmethod
    def from_function(cls, f: Callable, breakpoints, m: int) -> "PiecewiseChebyshev":
        """Sample a vectorised function on every grid of the partition."""
        nodes = partition_nodes(np.asarray(breakpoints, dtype=float), m)
        return cls(breakpoints=breakpoints, m=m, values=np.asarray(f(nodes), dtype=float))

    @property
    def n_intervals(self) -> int:
        return self.breakpoints.size - 1

    @property
    def a(self) -> float:
        return float(self.breakpoints[0])

    @property
    def b(self) -> float:
        return float(self.breakpoints[-1])

    def grid(self, j: int) -> ChebGrid:
        return cheb_grid(self.m, self.breakpoints[j], self.breakpoints[j + 1])

    def nodes(self) -> np.ndarray:
        return partition_nodes(self.breakpoints, self.m)

    def locate(self, ts) -> np.ndarray:
        """Interval index per point; interior breakpoints go to the right interval."""
        idx = np.searchsorted(self.breakpoints, ts, side='right') - 1
        return np.clip(idx, 0, self.n_intervals - 1)

    def eval_many(self, ts) -> np.ndarray:
        return evaluate_stack([self], ts)[0]

    def __call__(self, t: float) -> float:
        return pc_eval(self, t)

    def derivative(self) -> "PiecewiseChebyshev":
        """Per-interval spectral derivative (continuity across seams not enforced)."""
        D = spectral_differentiation_matrix(self.m)
        half = 0.5 * np.diff(self.breakpoints)
        return PiecewiseChebyshev(self.breakpoints, self.m, (self.values @ D.T) / half[:, None])

    def seam_mismatch(self) -> float:
        """Largest relative gap between node m of interval j and node 0 of j+1."""
        if self.n_intervals < 2:
            return 0.0
        left, right = self.values[:-1, -1], self.values[1:, 0]
        scale = np.maximum(np.maximum(np.abs(left), np.abs(right)), 1.0)
        return float(np.max(np.abs(left - right) / scale))

    def seams_consistent(self) -> bool:
        return self.seam_mismatch() <= SEAM_TOLERANCE_FACTOR * EPS


def partition_nodes(breakpoints: np.ndarray, m: int) -> np.ndarray:
    """(n, m+1) table of grid nodes; shared breakpoints are exact."""
    bp = np.asarray(breakpoints, dtype=float)
    x = reference_nodes(m)
    left, right = bp[:-1, None], bp[1:, None]
    nodes = 0.5 * (left + right) + 0.5 * (right - left) * x[None, :]
    nodes[:, 0], nodes[:, -1] = bp[:-1], bp[1:]
    return nodes


def evaluate_stack(functions: Sequence[PiecewiseChebyshev], ts) -> np.ndarray:
    """Evaluate functions sharing one partition at the points ``ts``.

    Returns an array of shape (len(functions), len(ts)).
    """
    first = functions[0]
    for f in functions[1:]:
        if f.m != first.m or not np.array_equal(f.breakpoints, first.breakpoints):
            raise ValueError("functions must share breakpoints and order")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size and (ts.min() < first.a or ts.max() > first.b or np.isnan(ts).any()):
        raise OutOfDomainError(f"points outside [{first.a!r}, {first.b!r}]")
    idx = first.locate(ts)
    bp = first.breakpoints
    nodes = partition_nodes(bp, first.m)[idx]
    stacked = np.stack([f.values for f in functions])[:, idx, :]
    return _barycentric_kernel(ts, nodes, stacked, bp[idx + 1] - bp[idx],
                               barycentric_weights(first.m))


def pc_eval(f: PiecewiseChebyshev, t: float) -> float:
    """Evaluate a piecewise representation at a single point."""
    t = float(t)
    if not f.a <= t <= f.b:
        raise OutOfDomainError(f"t={t!r} outside [{f.a!r}, {f.b!r}]")
    return float(evaluate_stack([f], [t])[0, 0])


def equispaced_breakpoints(a: float, b: float, n: int) -> np.ndarray:
    _check_interval(a, b)
    if n < 1:
        raise InvalidOrderError(f"number of intervals must be positive, got {n}")
    bp = np.linspace(a, b, n + 1)
    bp[0], bp[-1] = a, b
    return bp


def graded_mesh(k: int, exponent: float = None) -> np.ndarray:
    """Symmetric mesh +-(1 - 2^(-|j| exponent / k)), j = 0..k, clustered at +-1.

    With the default exponent = k the breakpoints are 1 - 2^-|j| and the
    mesh covers [-(1 - 2^-k), 1 - 2^-k] with 2k + 1 points.
    """
    if k < 1:
        raise InvalidOrderError(f"mesh levels must be positive, got {k}")
    exponent = float(k if exponent is None else exponent)
    j = np.arange(k + 1)
    xi = 1.0 - np.exp2(-j * exponent / k)
    return np.concatenate([-xi[:0:-1], xi])


def graded_left(a: float, b: float, split: float, n_graded: int, n_tail: int) -> np.ndarray:
    """Geometric grading toward a on [a, split], equispaced on [split, b]."""
    _check_interval(a, split)
    _check_interval(split, b)
    width = split - a
    graded = a + width * np.exp2(-np.arange(n_graded - 1, -1, -1, dtype=float))
    tail = np.linspace(split, b, n_tail + 1)[1:]
    bp = np.concatenate([[a], graded[:-1], [split], tail])
    bp[-1] = b
    return bp
