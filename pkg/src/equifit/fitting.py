"""Best uniform approximation of a finite point set by a basis combination.

The fit minimizes the largest (optionally weighted) absolute residual over
the data.  It is computed exactly by assembling a linear program with one
variable per coefficient plus the bound variable, and two rows per point:
an overshoot row (combination above the value) and an undershoot row.
Nonnegative weights enter by rescaling each point's design row and value,
which reduces the weighted problem to an unweighted one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSet, design_matrix, matrix_rank_estimate
from .errors import DimensionMismatch, EquifitError, SolverError
from .lp import FEAS_TOL, FREE, OPTIMAL, LinearProgram, LpSolution, solve_lp

# Membership slack for the active set, relative to max(1, discrepancy);
# residuals are recomputed in floating point so exact tightness is not
# testable.
ACTIVE_TOL_FACTOR = 1e-7


@dataclass
class ProblemInstance:
    """Data of one approximation problem.

    ``points`` is an (n, p) array, ``values`` the n targets, ``weights`` an
    optional nonnegative n-vector.  ``design_override`` replaces the design
    matrix computed from the basis; it supports point-wise surgery on the
    design (row sign flips, row rescaling) that no closed-form basis list
    expresses.
    """

    points: np.ndarray
    values: np.ndarray
    basis: BasisSet
    weights: np.ndarray | None = None
    design_override: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        n = self.points.shape[0]
        if n < 1:
            raise DimensionMismatch("need at least one point")
        if self.values.shape != (n,):
            raise DimensionMismatch(
                f"{n} points but values have shape {self.values.shape}"
            )
        if self.points.shape[1] != self.basis.dimension:
            raise DimensionMismatch(
                f"points have dimension {self.points.shape[1]}, basis expects "
                f"{self.basis.dimension}"
            )
        if not np.all(np.isfinite(self.points)) or not np.all(
            np.isfinite(self.values)
        ):
            raise DimensionMismatch("points and values must be finite")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (n,):
                raise DimensionMismatch(
                    f"weights have shape {self.weights.shape}, expected ({n},)"
                )
            if not np.all(np.isfinite(self.weights)) or np.any(self.weights < 0):
                raise DimensionMismatch("weights must be finite and nonnegative")
            if not np.any(self.weights > 0):
                raise DimensionMismatch("weights must not all be zero")
        if self.design_override is not None:
            self.design_override = np.asarray(self.design_override, dtype=float)
            if self.design_override.shape != (n, self.basis.size):
                raise DimensionMismatch(
                    f"design override has shape {self.design_override.shape}, "
                    f"expected ({n}, {self.basis.size})"
                )

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.basis.size

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def design(self) -> np.ndarray:
        if self.design_override is not None:
            return self.design_override
        return design_matrix(self.basis, self.points)

    def scaled_design_and_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Design rows and values with the weights folded in."""
        g = self.design()
        if self.weights is None:
            return g, self.values
        return self.weights[:, None] * g, self.weights * self.values


@dataclass
class FitResult:
    """Coefficients and discrepancy of a solved instance.

    ``residuals`` are the raw gaps value - combination; ``scaled_residuals``
    fold in the weights and are what the discrepancy bounds.  ``active_points``
    lists the indices whose scaled residual magnitude reaches the
    discrepancy (zero-weight points never qualify).  The LP solution is kept
    for certificate extraction.
    """

    instance: ProblemInstance
    coefficients: np.ndarray
    discrepancy: float
    residuals: np.ndarray
    scaled_residuals: np.ndarray
    active_points: tuple[int, ...]
    exact_interpolation: bool
    low_rank: bool
    lp_solution: LpSolution = field(repr=False)

    @property
    def active_tol(self) -> float:
        return ACTIVE_TOL_FACTOR * max(1.0, self.discrepancy)


def assemble_primal(instance: ProblemInstance) -> LinearProgram:
    """Build the fit LP: variables (coefficients..., bound), rows interleaved
    per point as (overshoot row, undershoot row).

    Row 2i holds "combination(x_i) - z <= y_i", row 2i+1 holds
    "-combination(x_i) - z <= -y_i"; with weights, design row and value are
    pre-multiplied by the point's weight.
    """
    g, y = instance.scaled_design_and_values()
    n, m = g.shape
    matrix = np.zeros((2 * n, m + 1))
    rhs = np.zeros(2 * n)
    matrix[0::2, :m] = g
    matrix[1::2, :m] = -g
    matrix[:, m] = -1.0
    rhs[0::2] = y
    rhs[1::2] = -y
    objective = np.zeros(m + 1)
    objective[m] = 1.0
    return LinearProgram(
        objective=objective,
        constraint_matrix=matrix,
        rhs=rhs,
        variable_kinds=(FREE,) * (m + 1),
    )


def fit(instance: ProblemInstance, feas_tol: float = FEAS_TOL) -> FitResult:
    """Solve the minimax fit for an instance.

    The discrepancy is the LP optimum; residuals are recomputed from the
    coefficients rather than read off LP slacks.  Raises SolverError when
    the LP layer fails.
    """
    lp = assemble_primal(instance)
    try:
        solution = solve_lp(lp, feas_tol=feas_tol)
    except EquifitError as exc:
        raise SolverError(f"fit LP failed: {exc}") from exc
    if solution.status != OPTIMAL:
        raise SolverError(
            f"fit LP ended with status {solution.status}: {solution.reason}"
        )

    m = instance.m
    coefficients = solution.primal[:m].copy()
    discrepancy = float(solution.objective_value)
    g = instance.design()
    residuals = instance.values - g @ coefficients
    if instance.weights is None:
        scaled = residuals.copy()
    else:
        scaled = instance.weights * residuals

    max_scaled = float(np.max(np.abs(scaled)))
    if abs(max_scaled - discrepancy) > 100 * feas_tol * max(1.0, discrepancy):
        raise SolverError(
            f"recomputed residual bound {max_scaled!r} is inconsistent with "
            f"the LP optimum {discrepancy!r}"
        )

    active_tol = ACTIVE_TOL_FACTOR * max(1.0, discrepancy)
    active = np.abs(scaled) >= discrepancy - active_tol
    if instance.weights is not None:
        active &= instance.weights > 0
    scaled_g, _ = instance.scaled_design_and_values()
    return FitResult(
        instance=instance,
        coefficients=coefficients,
        discrepancy=discrepancy,
        residuals=residuals,
        scaled_residuals=scaled,
        active_points=tuple(int(i) for i in np.flatnonzero(active)),
        exact_interpolation=discrepancy <= feas_tol,
        low_rank=matrix_rank_estimate(scaled_g) < m,
        lp_solution=solution,
    )


def objective_value(instance: ProblemInstance, coefficients: np.ndarray) -> float:
    """Largest (weighted) absolute residual of the given coefficients."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (instance.m,):
        raise DimensionMismatch(
            f"expected {instance.m} coefficients, got shape {coefficients.shape}"
        )
    residuals = instance.values - instance.design() @ coefficients
    if instance.weights is not None:
        residuals = instance.weights * residuals
    return float(np.max(np.abs(residuals)))
