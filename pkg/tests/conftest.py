import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=25, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rel(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / max(np.linalg.norm(b), 1e-300))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def poisson3():
    """3x3 Poisson, jacobi(1), middle point coarse: T_ff = 0."""
    from relaxamg import problems, relaxation, splitting
    setup = relaxation.build_setup(problems.poisson1d(3), "jacobi", omega=1.0)
    split = splitting.explicit_split(3, [1])
    return setup, split, splitting.canonical_basis(split)
