"""Best uniform (minimax) approximation of finite data sets.

Fits a linear combination of basis functions to points so that the largest
(optionally weighted) absolute residual is as small as possible, by solving
a linear program; exposes the dual certificate of optimality and the
equioscillation structure of the solution.
"""

from .basis import (
    BasisFunction,
    BasisSet,
    design_matrix,
    format_basis_spec,
    matrix_rank_estimate,
    parse_basis_spec,
)
from .certificates import (
    CertificateReport,
    DualCertificate,
    check_active_point_count,
    check_two_sided,
    extract_certificate,
    verify_identities,
)
from .equioscillation import (
    ImprovementCheck,
    LagrangePolynomial,
    PerturbationStep,
    ReferenceSet,
    alternation_pattern,
    lagrange_interpolate,
    one_sided_construction,
    perturbation_step,
    strict_improvement_check,
)
from .errors import (
    DegenerateCase,
    DimensionError,
    DimensionMismatch,
    DuplicateNodeError,
    EquifitError,
    EvaluationError,
    NoCandidate,
    NumericFailure,
    ParseError,
    PreconditionError,
    SolverError,
    TooLarge,
)
from .fitting import (
    FitResult,
    ProblemInstance,
    assemble_primal,
    fit,
    objective_value,
)
from .lp import (
    FREE,
    INFEASIBLE,
    NONNEGATIVE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    LpSolution,
    dual_of,
    solve_lp,
)
from .oracle import OracleResult, brute_force_fit

__version__ = "0.1.0"

__all__ = [
    "BasisFunction",
    "BasisSet",
    "CertificateReport",
    "DegenerateCase",
    "DimensionError",
    "DimensionMismatch",
    "DualCertificate",
    "DuplicateNodeError",
    "EquifitError",
    "EvaluationError",
    "FitResult",
    "FREE",
    "ImprovementCheck",
    "INFEASIBLE",
    "LagrangePolynomial",
    "LinearProgram",
    "LpSolution",
    "NoCandidate",
    "NONNEGATIVE",
    "NumericFailure",
    "OPTIMAL",
    "OracleResult",
    "ParseError",
    "PerturbationStep",
    "PreconditionError",
    "ProblemInstance",
    "ReferenceSet",
    "SolverError",
    "TooLarge",
    "UNBOUNDED",
    "alternation_pattern",
    "assemble_primal",
    "brute_force_fit",
    "check_active_point_count",
    "check_two_sided",
    "design_matrix",
    "dual_of",
    "extract_certificate",
    "fit",
    "format_basis_spec",
    "lagrange_interpolate",
    "matrix_rank_estimate",
    "objective_value",
    "one_sided_construction",
    "parse_basis_spec",
    "perturbation_step",
    "solve_lp",
    "strict_improvement_check",
    "verify_identities",
]
