import numpy as np
import pytest

from fracpow.exact import ExactSolutionSpec, exact_solution
from fracpow.fem import ProblemCoefficients, assemble, l2_project
from fracpow.geometry import quarter_disk_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(scope="session")
def level1_op():
    return assemble(quarter_disk_mesh(1), ProblemCoefficients(g=10.0))


@pytest.fixture(scope="session")
def level2_op():
    return assemble(quarter_disk_mesh(2), ProblemCoefficients(g=10.0))


@pytest.fixture(scope="session")
def test_problem():
    """Reference solution, initial projection, and exact final field on
    the level-1 mesh for g = 10, alpha = 0.5, T = 0.25."""
    spec = ExactSolutionSpec.for_parameters(10.0, 0.5, 0.25)

    def radius(x, y):
        return np.sqrt(x * x + y * y)

    def u_at(t):
        return lambda x, y: exact_solution(spec, radius(x, y), t)

    return spec, u_at


@pytest.fixture(scope="session")
def level1_initial(level1_op, test_problem):
    _, u_at = test_problem
    return l2_project(u_at(0.0), level1_op.mesh, level1_op.mass)
