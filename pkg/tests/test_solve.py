"""Basis functions, initial and boundary value solves from a phase."""
import numpy as np
import pytest

from src.core.chebcore import equispaced_breakpoints
from src.core.kummer import CoefficientProblem
from src.core.solve import (
    BoundaryConditions,
    basis_eval,
    basis_eval_many,
    eval_solution,
    eval_solution_many,
    match_conditions,
    solve_bvp,
    solve_bvp_with_phase,
    solve_ivp,
)
from src.data import specfun
from src.utils.errors import InvalidParametersError, OutOfDomainError, SingularSystemError
from src.utils.rng import uniform_points


def unit(lam, a, b):
    return CoefficientProblem(q=lambda t: np.ones_like(np.asarray(t, dtype=float)), lam=lam, a=a, b=b)


def test_boundary_conditions_validation():
    with pytest.raises(InvalidParametersError):
        BoundaryConditions(0.0, 0.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(InvalidParametersError):
        BoundaryConditions(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def test_wronskian_is_one(simple_1e3):
    _, built = simple_1e3
    ts = uniform_points(3, 1000, -1.0, 1.0)
    u, v, up, vp = basis_eval_many(built.phase, ts)
    assert np.max(np.abs(u * vp - up * v - 1.0)) < 1e-11
    single = basis_eval(built.phase, 0.25)
    assert abs(single[0] * single[3] - single[2] * single[1] - 1.0) < 1e-11


def test_ivp_unit_coefficient_is_sine(unit_phase):
    sol = match_conditions(unit_phase, 0.0, 0.0, unit_phase.lam)
    ts = np.linspace(0.0, 1.0, 101)
    y, yp = eval_solution_many(sol, ts)
    assert np.max(np.abs(y - np.sin(unit_phase.lam * ts))) < 1e-12
    assert np.max(np.abs(yp - unit_phase.lam * np.cos(unit_phase.lam * ts))) < 1e-10


def test_solve_ivp_builds_its_own_phase():
    prob = unit(10.0, 0.0, 1.0)
    sol = solve_ivp(prob, 0.0, 10.0, equispaced_breakpoints(0.0, 1.0, 4), 15)
    y, _ = eval_solution(sol, 0.5)
    assert abs(y - np.sin(5.0)) < 1e-12


def test_matching_at_interior_point(unit_phase):
    sol = match_conditions(unit_phase, 0.4, 1.5, -2.0)
    y, yp = eval_solution(sol, 0.4)
    assert y == pytest.approx(1.5, abs=1e-13)
    assert yp == pytest.approx(-2.0, abs=1e-12)


def test_dirichlet_bvp():
    lam = 10.0
    prob = unit(lam, 0.0, 1.0)
    bc = BoundaryConditions(1.0, 0.0, 1.0, 0.0, 0.0, np.sin(lam))
    sol = solve_bvp(prob, bc, equispaced_breakpoints(0.0, 1.0, 4), 15)
    ts = np.linspace(0.0, 1.0, 57)
    y, _ = eval_solution_many(sol, ts)
    assert np.max(np.abs(y - np.sin(lam * ts))) < 1e-11


def test_mixed_bvp_satisfies_conditions(unit_phase):
    bc = BoundaryConditions(2.0, 0.5, 1.0, -0.25, 1.0, 3.0)
    sol = solve_bvp_with_phase(unit_phase, bc)
    ya, ypa = eval_solution(sol, unit_phase.a)
    yb, ypb = eval_solution(sol, unit_phase.b)
    assert 2.0 * ya + 0.5 * ypa == pytest.approx(1.0, abs=1e-11)
    assert yb - 0.25 * ypb == pytest.approx(3.0, abs=1e-11)


def test_resonant_dirichlet_problem_is_singular():
    prob = unit(10.0, 0.0, np.pi)
    bc = BoundaryConditions(1.0, 0.0, 1.0, 0.0, 0.0, 1.0)
    with pytest.raises(SingularSystemError, match="singular boundary system"):
        solve_bvp(prob, bc, equispaced_breakpoints(0.0, np.pi, 8), 15)


def test_simple_problem_against_direct_solve(simple_1e3):
    spec, built = simple_1e3
    sol = match_conditions(built.phase, spec.a, 0.0, spec.lam)
    pts = uniform_points(20160101, 1000, spec.a, spec.b)
    y, _ = eval_solution_many(sol, pts)
    reference = specfun.simple_reference(spec.lam, 0.0, spec.lam, pts)
    assert np.max(np.abs(y - reference)) < 1e-11


@pytest.mark.parametrize("lam", [10.0, 100.0])
def test_simple_problem_low_frequencies(lam):
    spec = specfun.simple_problem(lam)
    sol = solve_ivp(spec, 0.0, lam, spec.breakpoints, spec.m)
    pts = uniform_points(7, 1000, spec.a, spec.b)
    y, _ = eval_solution_many(sol, pts)
    assert np.max(np.abs(y - specfun.simple_reference(lam, 0.0, lam, pts))) < 1e-11


def test_evaluation_outside_domain(unit_phase):
    sol = match_conditions(unit_phase, 0.0, 1.0, 0.0)
    with pytest.raises(OutOfDomainError):
        eval_solution(sol, 1.5)


def test_scaling_initial_data_scales_solution(simple_1e3):
    spec, built = simple_1e3
    pts = uniform_points(12, 1000, spec.a, spec.b)
    y1, yp1 = eval_solution_many(match_conditions(built.phase, spec.a, 0.3, 700.0), pts)
    y2, yp2 = eval_solution_many(match_conditions(built.phase, spec.a, 0.6, 1400.0), pts)
    assert np.max(np.abs(y2 - 2.0 * y1)) <= 1e-13 * np.max(np.abs(y2))
    assert np.max(np.abs(yp2 - 2.0 * yp1)) <= 1e-13 * np.max(np.abs(yp2))


def test_solution_satisfies_the_equation(simple_1e3):
    spec, built = simple_1e3
    lam = spec.lam
    sol = match_conditions(built.phase, spec.a, 1.0, 0.0)
    h = 1e-3 / lam
    ts = uniform_points(13, 200, -0.99, 0.99)
    y_minus, _ = eval_solution_many(sol, ts - h)
    y, _ = eval_solution_many(sol, ts)
    y_plus, _ = eval_solution_many(sol, ts + h)
    assert 0.5 < np.max(np.abs(y)) < 2.0
    ypp = (y_plus - 2.0 * y + y_minus) / (h * h)
    assert np.max(np.abs(ypp + lam ** 2 * spec.q(ts) * y)) <= 1e-6 * lam ** 2
