"""Rational time stepping for Cauchy problems with a fractional power
of a discretized second-order elliptic operator."""

from .exact import ExactSolutionSpec, RobinRoots, bessel_j0, bessel_j1, exact_solution, robin_roots
from .fem import DiscreteOperator, ProblemCoefficients, assemble, error_norms, l2_error, l2_project
from .geometry import BoundaryLabel, Mesh, quarter_disk_mesh, read_mesh, write_mesh
from .linalg import SparseSymMatrix, SpectrumBounds, cg_solve, dense_generalized_eig, spectrum_bounds
from .quadrature import CustomWeight, JacobiWeight, QuadratureRule, gauss_custom, gauss_jacobi
from .rational import (
    ApproxKind,
    GammaBound,
    RationalApprox,
    build_negative_power,
    build_resolvent,
    eval_scalar,
    gamma_bar,
)
from .stepper import (
    RunResult,
    SchemeConfig,
    SchemeKind,
    StabilityCertificate,
    run_explicit,
    run_implicit,
    spectral_reference,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxKind",
    "BoundaryLabel",
    "CustomWeight",
    "DiscreteOperator",
    "ExactSolutionSpec",
    "GammaBound",
    "JacobiWeight",
    "Mesh",
    "ProblemCoefficients",
    "QuadratureRule",
    "RationalApprox",
    "RobinRoots",
    "RunResult",
    "SchemeConfig",
    "SchemeKind",
    "SparseSymMatrix",
    "SpectrumBounds",
    "StabilityCertificate",
    "assemble",
    "bessel_j0",
    "bessel_j1",
    "build_negative_power",
    "build_resolvent",
    "cg_solve",
    "dense_generalized_eig",
    "error_norms",
    "eval_scalar",
    "exact_solution",
    "gamma_bar",
    "gauss_custom",
    "gauss_jacobi",
    "l2_error",
    "l2_project",
    "quarter_disk_mesh",
    "read_mesh",
    "robin_roots",
    "run_explicit",
    "run_implicit",
    "spectral_reference",
    "spectrum_bounds",
    "write_mesh",
]
