"""Prometheus metrics exporters."""
from prometheus_client import Counter, Histogram, CollectorRegistry

from config.settings import get_settings

# Create registry
registry = CollectorRegistry()

# ========== SOLVER METRICS ==========
rhs_evaluations = Counter(
    'rhs_evaluations_total',
    'Right-hand-side evaluations performed by the collocation solver',
    registry=registry
)

sdc_sweeps = Counter(
    'sdc_sweeps_total',
    'Correction sweeps performed by the collocation solver',
    registry=registry
)

solver_failures = Counter(
    'solver_failures_total',
    'Collocation solver failures',
    ['kind'],
    registry=registry
)

# ========== PHASE METRICS ==========
phases_built = Counter(
    'phases_built_total',
    'Phase functions constructed',
    ['problem'],
    registry=registry
)

phase_construction_time = Histogram(
    'phase_construction_seconds',
    'Phase function construction time in seconds',
    buckets=(1e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0, 3.0, 10.0, 30.0),
    registry=registry
)

# ========== HELPER FUNCTIONS ==========
def _enabled() -> bool:
    return get_settings().METRICS_ENABLED

def record_rhs_evaluations(count: int):
    """Record right-hand-side evaluations."""
    if _enabled() and count > 0:
        rhs_evaluations.inc(count)

def record_sweeps(count: int):
    """Record correction sweeps."""
    if _enabled() and count > 0:
        sdc_sweeps.inc(count)

def record_solver_failure(kind: str):
    """Record a solver failure by error class name."""
    if _enabled():
        solver_failures.labels(kind=kind).inc()

def record_phase_built(problem: str, seconds: float):
    """Record a completed phase construction."""
    if _enabled():
        phases_built.labels(problem=problem).inc()
        phase_construction_time.observe(seconds)
