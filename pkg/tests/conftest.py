"""Shared fixtures and helpers for the lrange test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lrange import (
    DiagonalTuple,
    HermitianTuple,
    LinearMapSpec,
    haar_unitary,
    random_diagonal_tuple,
    random_hermitian_tuple,
)

# Numerical property tests do real linear algebra; wall-clock deadlines only
# produce flaky failures on loaded CI boxes.
settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    max_examples=25,
)
settings.load_profile("numeric")


def rand_map(l: int, m: int, n: int, seed: int) -> LinearMapSpec:
    """A random trace-form map: coefficient rows drawn as Hermitian matrices."""
    rows = [random_hermitian_tuple(n, m, seed ^ (0x9E3779B9 * (k + 1))) for k in range(l)]
    coeffs = [[rows[k].items[i].mat for i in range(m)] for k in range(l)]
    return LinearMapSpec(coeffs)


@pytest.fixture
def small_instance():
    """A fixed, well-conditioned n=3 problem used by several modules."""
    d = random_diagonal_tuple(3, 2, seed=11)
    spec = rand_map(3, 2, 3, seed=7)
    u = haar_unitary(3, seed=5)
    return d, spec, u


def as_tuple(d: DiagonalTuple) -> HermitianTuple:
    return d.to_hermitian()


def frob(x) -> float:
    return float(np.linalg.norm(np.asarray(x)))
