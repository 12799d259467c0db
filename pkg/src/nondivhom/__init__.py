"""Periodic homogenization of non-divergence form operators.

Fourier-Galerkin solvers for the invariant measure and cell problems, the
third-order tensor that decides whether the first-order corrector of the
homogenized problem vanishes, closed-form constructions to compare against,
and a finite-difference laboratory for Dirichlet convergence rates.
"""

from .errors import (
    AliasError,
    CanonicalError,
    CompatibilityError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    EllipticityError,
    HomogenizationError,
    PositivityError,
    SingularSystemError,
    TraceError,
    UnknownName,
)
from .field import (
    CoefficientField,
    PeriodicScalarField,
    WaveTerm,
    constant_field,
    derivative,
    diagonal_field,
    field_from_expr,
    field_from_function,
    field_from_json,
    field_from_terms,
    inner_product,
)
from .homogenize import (
    ClassificationReport,
    ThirdOrderTensor,
    Verdict,
    classify,
    diagonal_classify_shortcut,
    effective_matrix,
    third_order_tensor,
)
from .periodic_solver import solve_cell, solve_invariant_measure, solve_poisson, solve_with_shift

__version__ = "0.1.0"

__all__ = [
    "AliasError",
    "CanonicalError",
    "ClassificationReport",
    "CoefficientField",
    "CompatibilityError",
    "ConvergenceError",
    "DegenerateError",
    "DomainError",
    "EllipticityError",
    "HomogenizationError",
    "PeriodicScalarField",
    "PositivityError",
    "SingularSystemError",
    "ThirdOrderTensor",
    "TraceError",
    "UnknownName",
    "Verdict",
    "WaveTerm",
    "classify",
    "constant_field",
    "derivative",
    "diagonal_classify_shortcut",
    "diagonal_field",
    "effective_matrix",
    "field_from_expr",
    "field_from_function",
    "field_from_json",
    "field_from_terms",
    "inner_product",
    "solve_cell",
    "solve_invariant_measure",
    "solve_poisson",
    "solve_with_shift",
    "third_order_tensor",
]
