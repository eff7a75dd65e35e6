"""Windowing, the two Kummer solves and phase assembly."""
import numpy as np
import pytest
from pydantic import ValidationError

from src.core.chebcore import equispaced_breakpoints
from src.core.kummer import (
    CoefficientProblem,
    WindowSpec,
    assemble_phase,
    build_phase,
    construct_phase,
    kummer_residual,
    phase_residual,
    positivity_guard,
    solve_original,
    solve_windowed,
    window_function,
    windowed_coefficient,
)
from src.utils.errors import CoefficientNonpositiveError, InvalidIntervalError, InvalidParametersError
from src.utils.rng import uniform_points


def test_problem_validation():
    with pytest.raises(InvalidParametersError):
        CoefficientProblem(q=np.cos, lam=-1.0, a=0.0, b=1.0)
    with pytest.raises(InvalidIntervalError):
        CoefficientProblem(q=np.cos, lam=1.0, a=1.0, b=0.0)
    with pytest.raises(ValidationError):
        WindowSpec(steepness=5.0)


def test_window_function():
    assert window_function(0.5, 0.0, 1.0) == 0.5
    ts = np.linspace(-0.5, 0.5, 21)
    psi = window_function(ts, -1.0, 1.0)
    assert np.all(np.diff(psi) < 0)
    assert np.all((psi > 0) & (psi < 1))
    assert np.allclose(window_function(-ts, -1.0, 1.0), 1.0 - psi, atol=3e-16, rtol=0)
    complement = 1.0 - window_function(-1.0, -1.0, 1.0)
    assert complement < np.finfo(float).eps
    assert window_function(1.0, -1.0, 1.0) < 2e-20


def test_windowed_coefficient_tails(simple_1e3):
    spec, _ = simple_1e3
    q_tilde = windowed_coefficient(spec)
    assert abs(q_tilde(-1.0) - 1.0) <= 1e-15
    assert abs(q_tilde(1.0) - spec.q(1.0)) <= 2e-20 * abs(1.0 - spec.q(1.0)) + 1e-300

    unit = CoefficientProblem(q=lambda t: np.ones_like(np.asarray(t, dtype=float)), lam=3.0, a=0.0, b=2.0)
    assert np.allclose(windowed_coefficient(unit)(np.linspace(0.0, 2.0, 9)), 1.0, rtol=0, atol=5e-16)


def test_kummer_residual_values():
    assert kummer_residual(0.0, 0.0, 0.0, 1.0, 7.0) == 0.0
    assert abs(kummer_residual(np.log(4.0), 0.0, 0.0, 4.0, 7.0)) < 1e-12
    assert kummer_residual(0.0, 0.0, 1.0, 1.0, 10.0) == 1.0


def test_positivity_guard_catches_sign_change():
    prob = CoefficientProblem(q=lambda t: np.asarray(t, dtype=float) - 0.5, lam=10.0, a=0.0, b=1.0)
    with pytest.raises(CoefficientNonpositiveError):
        positivity_guard(prob, [0.0, 1.0], 4)
    with pytest.raises(CoefficientNonpositiveError):
        build_phase(prob, [0.0, 0.5, 1.0], 8)


def test_unit_coefficient_gives_linear_phase(unit_problem, unit_phase):
    prob, bp = unit_problem
    nodes = unit_phase.alpha.nodes()
    assert np.max(np.abs(unit_phase.alpha.values - prob.lam * (nodes - prob.a))) < 1e-12
    assert np.max(np.abs(unit_phase.alphap.values - prob.lam)) < 1e-12
    assert np.max(np.abs(unit_phase.alphapp.values)) < 1e-10
    assert unit_phase.alpha.values[0, 0] == 0.0


def test_unit_coefficient_r_stays_zero(unit_problem):
    prob, bp = unit_problem
    r1, r1p = solve_windowed(prob, None, bp, 15)
    assert np.max(np.abs(r1.values)) < 1e-13 and np.max(np.abs(r1p.values)) < 1e-11
    r2, r2p = solve_original(prob, bp, 15, (0.0, 0.0))
    assert np.all(r2.values == 0.0) and np.all(r2p.values == 0.0)


def test_doubling_lambda_doubles_phase(unit_problem, unit_phase):
    prob, bp = unit_problem
    doubled = CoefficientProblem(q=prob.q, lam=2 * prob.lam, a=prob.a, b=prob.b)
    phase2 = build_phase(doubled, bp, 15)
    ts = np.linspace(0.1, 1.0, 25)
    ratio = phase2.alpha.eval_many(ts) / unit_phase.alpha.eval_many(ts)
    assert np.max(np.abs(ratio - 2.0)) < 1e-13


def test_constant_coefficient_relaxes_to_log():
    prob = CoefficientProblem(q=lambda t: np.full_like(np.asarray(t, dtype=float), 4.0), lam=100.0, a=0.0, b=1.0)
    bp = equispaced_breakpoints(0.0, 1.0, 10)
    phase = build_phase(prob, bp, 15)
    nodes = phase.r.nodes()
    tail = nodes >= 0.9
    assert np.max(np.abs(phase.r.values[tail] - np.log(4.0))) < 1e-11


def test_simple_problem_phase_invariants(simple_1e3):
    spec, built = simple_1e3
    phase, lam = built.phase, spec.lam
    ts = uniform_points(5, 1000, spec.a, spec.b)

    # monotone
    assert np.all(phase.alphap.values > 0)
    assert np.all(phase.eval_many(ts)[1] > 0)
    assert phase.alpha.values[-1, -1] > 0

    # continuity across breakpoints
    a = phase.alpha.values
    assert np.all(np.abs(a[:-1, -1] - a[1:, 0]) <= 1e-12 * (1.0 + np.abs(a[1:, 0])))
    assert phase.alpha.seams_consistent() and phase.alphap.seams_consistent()

    # alpha'' = alpha' r' / 2 at nodes
    assert np.allclose(phase.alphapp.values, 0.5 * phase.alphap.values * phase.rp.values, rtol=1e-15, atol=0)

    # Kummer residual of r2 against q
    pts = uniform_points(11, 100, spec.a, spec.b)
    q_max = np.max(spec.q(ts))
    assert phase_residual(phase, spec.q, pts) <= 1e-8 * lam ** 2 * q_max


def test_simple_problem_windowed_solution(simple_1e3):
    spec, built = simple_1e3
    r1, r1p = built.r1, built.r1p
    lam = spec.lam
    pts = uniform_points(17, 100, spec.a, spec.b)
    rpp = r1p.derivative()
    res = kummer_residual(r1.eval_many(pts), r1p.eval_many(pts), rpp.eval_many(pts),
                          windowed_coefficient(spec)(pts), lam)
    assert np.max(np.abs(res)) <= 1e-8 * lam ** 2 * np.max(spec.q(pts))

    log_q = np.log(spec.q(np.linspace(-1.0, 1.0, 201)))
    assert np.isfinite(r1.values[-1, -1]) and np.isfinite(r1p.values[-1, -1])
    assert abs(r1.values[-1, -1]) <= np.max(np.abs(log_q)) + 1.0

    # window is inactive on the last interval, so both solves agree there
    assert np.max(np.abs(built.phase.r.values[-1] - r1.values[-1])) < 1e-10


def test_assemble_phase_from_given_r(unit_problem):
    prob, bp = unit_problem
    r2, r2p = solve_original(prob, bp, 15, (0.0, 0.0))
    phase = assemble_phase(prob, r2, r2p)
    assert phase.alpha.values[-1, -1] == pytest.approx(prob.lam * (prob.b - prob.a), rel=1e-14)


def test_construction_reports_work(unit_problem):
    prob, bp = unit_problem
    built = construct_phase(prob, bp, 15)
    assert built.rhs_evaluations > 0
    assert built.seconds >= 0.0


def test_partition_must_match_problem(unit_problem):
    prob, _ = unit_problem
    with pytest.raises(InvalidIntervalError):
        build_phase(prob, [0.0, 0.5], 8)
