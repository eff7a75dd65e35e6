"""Test problems, reference values and special-function evaluation through a phase."""
import math

import numpy as np
import pytest
from scipy import special

from src.core.kummer import construct_phase, kummer_residual
from src.data import specfun
from src.utils.errors import InvalidOrderError, InvalidParametersError, OutOfDomainError
from src.utils.rng import uniform_points


@pytest.fixture(scope="module")
def bessel_100():
    spec = specfun.bessel_problem(100)
    return spec, construct_phase(spec, spec.breakpoints, spec.m).phase


def test_simple_problem_definition():
    spec = specfun.simple_problem(10.0)
    assert spec.q(0.0) == 1.0
    assert spec.q(1.0) == pytest.approx(1.0 - math.cos(3.0), abs=1e-15)
    assert spec.n_intervals == 10 and spec.m == 15
    assert spec.describe_partition() == "10x16"
    assert spec.label == "simple"


def test_chebyshev_problem_definition():
    lam = 100.0
    spec = specfun.chebyshev_problem(lam)
    ts = np.linspace(0.0, 0.99, 12)
    assert np.array_equal(spec.q(ts), spec.q(-ts))
    assert lam ** 2 * spec.q(0.0) == pytest.approx((2.0 + 4.0 * lam ** 2) / 4.0, rel=1e-15)
    assert spec.b == 1.0 - 2.0 ** -20 and spec.a == -spec.b
    assert spec.breakpoints.size == 21


def test_arccos_phase_solves_chebyshev_kummer_equation():
    lam, t = 100.0, 0.5
    spec = specfun.chebyshev_problem(lam)
    w = 1.0 - t * t
    r, rp, rpp = -math.log(w), 2.0 * t / w, 2.0 * (1.0 + t * t) / w ** 2
    assert abs(kummer_residual(r, rp, rpp, spec.q(t), lam)) <= 1e-6


def test_bessel_problem_definition():
    assert specfun.bessel_turning_point(100) == pytest.approx(99.99875, abs=1e-5)
    spec = specfun.bessel_problem(100)
    assert spec.lam == 100.0 and spec.b == 1000.0
    assert spec.q(spec.a) > 0
    assert spec.q(1000.0) == pytest.approx((1.0 - (1e4 - 0.25) / 1e6) / 1e4, rel=1e-14)
    assert spec.n_intervals == 30
    with pytest.raises(InvalidOrderError):
        specfun.bessel_problem(5)


def test_legendre_problem_definition():
    nu = 7.0
    spec = specfun.legendre_problem(nu)
    assert spec.breakpoints.size == 101
    assert spec.b == 1.0 - 2.0 ** -50
    assert nu ** 2 * spec.q(0.0) == pytest.approx(1.0 + nu + nu * nu, rel=1e-15)


def test_prolate_problem_definition():
    c, chi = 1e4, 2.18416195669669e8
    spec = specfun.prolate_problem(c, chi)
    assert c * c * spec.q(0.0) == pytest.approx(1.0 + chi, rel=1e-15)
    w = 0.75
    assert c * c * spec.q(0.5) == pytest.approx(1.0 / w ** 2 + (chi - 0.25 * c * c) / w, rel=1e-14)
    with pytest.raises(InvalidParametersError):
        specfun.prolate_problem(1e4, 1e7)


def test_build_problem_registry():
    assert specfun.build_problem("simple", lam=5.0).lam == 5.0
    with pytest.raises(InvalidParametersError):
        specfun.build_problem("airy", lam=5.0)


def test_tabulated_problem(tmp_path):
    path = tmp_path / "coefficient.csv"
    ts = np.linspace(0.0, 1.0, 41)
    path.write_text("t,q\n" + "\n".join(f"{float(t)!r},{float(2.0 + t * t)!r}" for t in ts) + "\n")
    spec = specfun.tabulated_problem(str(path), lam=20.0, intervals=4)
    assert spec.a == 0.0 and spec.b == 1.0
    assert spec.q(0.5) == pytest.approx(2.25, abs=1e-6)


def test_bessel_reference_values():
    assert specfun.bessel_reference(0, 1.0) == pytest.approx(0.76519768655796655, abs=1e-15)
    assert specfun.bessel_reference(1, 0.0) == 0.0
    assert specfun.bessel_reference(0, 0.0) == 1.0
    ts = np.linspace(0.5, 60.0, 40)
    for n in (0, 1, 2, 7, 30):
        assert np.allclose(specfun.bessel_reference(n, ts), special.jv(n, ts), rtol=0, atol=1e-13)
    with pytest.raises(InvalidOrderError):
        specfun.bessel_reference(-1, 1.0)
    with pytest.raises(OutOfDomainError):
        specfun.bessel_reference(2, -1.0)


@pytest.mark.parametrize("n", [1, 5, 100, 1000])
def test_bessel_triple_satisfies_recurrence(n):
    ts = np.linspace(0.1, 10.0 * n, 50)
    jm1, j, jp1 = specfun.bessel_triple(n, ts)
    keep = np.abs(j) > 1e-200
    jm1, j, jp1, ts = jm1[keep], j[keep], jp1[keep], ts[keep]
    scale = np.maximum(np.abs(jm1) + np.abs(jp1), np.abs(2.0 * n / ts * j))
    assert np.max(np.abs(jp1 + jm1 - 2.0 * n / ts * j) / scale) < 1e-12


def test_bessel_derivative_reference():
    ts = np.linspace(1.0, 50.0, 20)
    assert np.allclose(specfun.bessel_derivative_reference(10, ts), special.jvp(10, ts), rtol=0, atol=1e-13)


def test_legendre_reference_closed_forms():
    ts = uniform_points(42, 100, -1.0, 1.0)
    closed = [
        np.ones_like(ts),
        ts,
        (3 * ts ** 2 - 1) / 2,
        (5 * ts ** 3 - 3 * ts) / 2,
        (35 * ts ** 4 - 30 * ts ** 2 + 3) / 8,
        (63 * ts ** 5 - 70 * ts ** 3 + 15 * ts) / 8,
    ]
    for n, expected in enumerate(closed):
        assert np.max(np.abs(specfun.legendre_reference(n, ts) - expected)) < 1e-14
    assert specfun.legendre_reference(1, 0.3) == 0.3

    p10 = (46189 * 0.25 ** 10 - 109395 * 0.25 ** 8 + 90090 * 0.25 ** 6
           - 30030 * 0.25 ** 4 + 3465 * 0.25 ** 2 - 63) / 256
    assert specfun.legendre_reference(10, 0.25) == pytest.approx(p10, abs=1e-15)
    with pytest.raises(OutOfDomainError):
        specfun.legendre_reference(3, 1.5)


def test_simple_reference_limits():
    with pytest.raises(InvalidParametersError):
        specfun.simple_reference(1e5, 0.0, 1.0, [0.0])


def test_bessel_via_phase(bessel_100):
    spec, phase = bessel_100
    pts = uniform_points(1, 1000, spec.a, spec.b)
    values = specfun.bessel_eval_via_phase(100, pts, phase)
    assert np.max(np.abs(values - specfun.bessel_reference(100, pts))) <= 1e-11
    at_end = specfun.bessel_eval_via_phase(100, [spec.b], phase)[0]
    assert at_end == pytest.approx(specfun.bessel_reference(100, spec.b), abs=5e-14)


def test_bessel_phase_wronskian_and_monotone(bessel_100):
    from src.core.solve import basis_eval_many

    spec, phase = bessel_100
    ts = uniform_points(9, 1000, spec.a, spec.b)
    u, v, up, vp = basis_eval_many(phase, ts)
    assert np.max(np.abs(u * vp - up * v - 1.0)) < 1e-11
    assert np.all(np.diff(phase.alpha.eval_many(ts)) >= 0)


def test_chebyshev_phase_difference_decays():
    diffs = [specfun.chebyshev_phase_difference(lam) for lam in (10.0, 100.0, 1000.0)]
    assert diffs[0] <= 1e-4
    assert diffs[2] <= 1e-9
    assert diffs[1] < diffs[0]
    assert diffs[2] <= max(diffs[1], 1e-12)


def test_construction_cost_is_frequency_independent():
    low = specfun.simple_problem(10.0)
    high = specfun.simple_problem(1e7)
    low_built = construct_phase(low, low.breakpoints, low.m)
    high_built = construct_phase(high, high.breakpoints, high.m)
    mid = specfun.simple_problem(1e3)
    mid_built = construct_phase(mid, mid.breakpoints, mid.m)
    assert high_built.rhs_evaluations == low_built.rhs_evaluations == mid_built.rhs_evaluations


def test_construction_time_is_frequency_independent():
    def best_time(lam):
        spec = specfun.simple_problem(lam)
        return min(construct_phase(spec, spec.breakpoints, spec.m).seconds for _ in range(3))

    best_time(10.0)
    assert best_time(1e7) <= 2.0 * best_time(10.0)


def test_bessel_order_1000_via_phase():
    spec = specfun.bessel_problem(1000)
    pts = uniform_points(4, 1000, spec.a, spec.b)
    values = specfun.bessel_eval_via_phase(1000, pts)
    assert np.max(np.abs(values - specfun.bessel_reference(1000, pts))) <= 1e-11


def test_chebyshev_basis_amplitude_at_center():
    from src.core.solve import basis_eval

    lam = 1000.0
    spec = specfun.chebyshev_problem(lam)
    phase = construct_phase(spec, spec.breakpoints, spec.m).phase
    u, v, _, _ = basis_eval(phase, 0.0)
    assert abs(lam * (u * u + v * v) - 1.0) <= 1e-12


def test_simple_bench_evaluation_is_fast():
    from src.data.benchmarks import run_suite

    (report,) = run_suite("simple", [100.0], points=1000, seed=5, repeats=20)
    assert report.error is None
    assert report.eval_seconds < 1e-5
    assert report.max_error <= 1e-11


@pytest.mark.slow
def test_bessel_large_order():
    spec = specfun.bessel_problem(10_000)
    pts = uniform_points(2, 1000, spec.a, spec.b)
    values = specfun.bessel_eval_via_phase(10_000, pts)
    assert np.max(np.abs(values - specfun.bessel_reference(10_000, pts))) <= 1e-11


@pytest.mark.slow
def test_legendre_via_phase():
    nu = 31416
    pts = uniform_points(3, 1000, -0.9, 0.9)
    values = specfun.legendre_eval_via_phase(nu, pts)
    assert np.max(np.abs(values - specfun.legendre_reference(nu, pts))) <= 1e-10


@pytest.mark.slow
def test_prolate_zero_count():
    c, n, chi = specfun.PROLATE_TABLE[0]
    report = specfun.prolate_phase_report(c, chi)
    assert report.residual <= 1e-8 * report.max_coefficient
    assert abs(report.zero_count - n) <= 5


@pytest.mark.slow
def test_legendre_very_large_degree():
    nu = 314159
    pts = uniform_points(6, 1000, -0.9, 0.9)
    values = specfun.legendre_eval_via_phase(nu, pts)
    assert np.max(np.abs(values - specfun.legendre_reference(nu, pts))) <= 1e-10


@pytest.mark.slow
def test_bessel_phase_evaluation_beats_recurrence():
    from src.data.benchmarks import run_suite

    (report,) = run_suite("bessel", [10_000], points=1000, seed=8, repeats=5)
    assert report.error is None
    assert report.oracle_seconds >= 100.0 * report.eval_seconds
