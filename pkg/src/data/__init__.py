"""Test problems, reference values, phase files and benchmark suites."""
