"""Point generator, checksums, errors and settings."""
import hashlib

import numpy as np
import pytest

from config.settings import get_bench_config, get_problem_config, get_settings, get_solver_config
from src.utils.errors import NoConvergenceError, NumericalFailure, PhaseFunctionError, SingularSystemError
from src.utils.hashing import metadata_hash, table_hash, verify_tables
from src.utils.rng import splitmix64, uniform, uniform_points


def test_splitmix64_known_output():
    assert int(splitmix64(0, 1)[0]) == 0xE220A8397B1DCDAF


def test_points_are_deterministic_and_in_range():
    a = uniform_points(7, 1000, -1.0, 1.0)
    b = uniform_points(7, 1000, -1.0, 1.0)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a) >= 0)
    assert a.min() >= -1.0 and a.max() < 1.0
    assert not np.array_equal(a, uniform_points(8, 1000, -1.0, 1.0))
    u = uniform(3, 500)
    assert np.all((u >= 0.0) & (u < 1.0))
    assert np.array_equal(uniform_points(3, 5, 0.0, 1.0, sort=False), u[:5])


def test_table_hash_is_byte_level():
    table = np.arange(6, dtype=float).reshape(2, 3)
    assert table_hash(table) == hashlib.sha256(table.astype('<f8').tobytes()).hexdigest()
    assert verify_tables({"alpha": table}, {"alpha": table_hash(table)})
    changed = table.copy()
    changed[0, 0] = np.nextafter(0.0, 1.0)
    assert not verify_tables({"alpha": changed}, {"alpha": table_hash(table)})


def test_metadata_hash_ignores_key_order():
    assert metadata_hash({"a": 1, "b": 2.5}) == metadata_hash({"b": 2.5, "a": 1})


def test_interval_index_is_attached():
    error = NoConvergenceError("sweeps stalled", residual=1e-9).with_interval(4)
    assert error.interval == 4
    assert str(error).startswith("interval 4: ")
    assert error.residual == 1e-9
    assert isinstance(error, NumericalFailure) and isinstance(error, PhaseFunctionError)
    assert isinstance(SingularSystemError("x"), ArithmeticError)


def test_configuration_files_load():
    assert get_settings().DEFAULT_SEED == 20160101
    assert get_solver_config()["ivp"]["order"] == 15
    assert get_solver_config()["window"]["steepness"] == 13.0
    assert "simple" in get_problem_config()
    assert get_bench_config()["suites"]["legendre"]["orders"] == [31416, 314159]


@pytest.mark.parametrize("seed", [0, 1, 2 ** 63])
def test_uniform_seeds_wrap(seed):
    assert uniform(seed, 10).shape == (10,)
