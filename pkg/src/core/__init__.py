"""Numerical core: Chebyshev grids, stiff collocation solver, phase construction, solutions."""
