"""Shared fixtures: phase functions are expensive, so build them once per session."""
import numpy as np
import pytest

from src.core.kummer import CoefficientProblem, construct_phase
from src.core.chebcore import equispaced_breakpoints
from src.data import specfun


@pytest.fixture(scope="session")
def simple_1e3():
    spec = specfun.simple_problem(1e3)
    return spec, construct_phase(spec, spec.breakpoints, spec.m)


@pytest.fixture(scope="session")
def unit_problem():
    """q = 1 on [0, 1] with lambda = 10; alpha = lambda t exactly."""
    prob = CoefficientProblem(q=lambda t: np.ones_like(np.asarray(t, dtype=float)), lam=10.0, a=0.0, b=1.0)
    return prob, equispaced_breakpoints(0.0, 1.0, 4)


@pytest.fixture(scope="session")
def unit_phase(unit_problem):
    prob, bp = unit_problem
    return construct_phase(prob, bp, 15).phase
