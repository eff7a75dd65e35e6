"""
Numerical constants and exit codes used throughout the codebase.
"""
import numpy as np

# Machine precision
EPS = float(np.finfo(float).eps)

# Barycentric evaluation snaps to a node within this many eps * (b - a)
NODE_SNAP_FACTOR = 4.0

# Shared-breakpoint consistency tolerance, in units of eps (relative)
SEAM_TOLERANCE_FACTOR = 10.0

# Window steepness: smallest integer with both erf tails below machine precision
DEFAULT_WINDOW_STEEPNESS = 13.0

# Finite-difference Jacobian step is sqrt(eps) * (1 + |y|)
FD_STEP = float(np.sqrt(EPS))

# Newton steps below this (relative, per component) are in the quadratic tail:
# taken undamped, and the next step lands at round-off
QUADRATIC_TAIL = 1.0e-7

# Relative determinant threshold for the 2x2 boundary system
SINGULAR_DET_TOL = 1.0e-13

# A Newton step at round-off that shrinks by less than this has stagnated
STAGNATION_RATIO = 0.5

# Sweeps stall when the residual shrinks by less than this per sweep
SWEEP_STALL_RATIO = 0.9

# Miller recurrence start: extra indices above max(n, t)
BESSEL_START_PAD = 40
BESSEL_START_SCALE = 10.0
RECURRENCE_RESCALE = 1.0e250

# Phase file format
PHASE_FILE_MAGIC = b"PHFN"
PHASE_FILE_VERSION = 1
PHASE_FUNCTIONS = ("alpha", "alphap", "alphapp", "r", "rp")

# CLI exit codes
EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL_FAILURE = 3
