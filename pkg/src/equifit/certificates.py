"""Optimality certificates for minimax fits.

The fit LP interleaves two rows per point: the overshoot row (combination
above the value) at even 0-based positions, the undershoot row at odd
positions.  The row multipliers ``beta`` returned by the solver certify
optimality:

* ``beta >= 0`` and ``sum(beta) = 1`` (the bound column of the LP);
* each basis function is ``beta``-orthogonal to the data: the overshoot
  and undershoot sums of ``beta * basis(x)`` cancel;
* nonzero multipliers sit only on tight rows (complementary slackness);
* pairing ``beta`` with the signed residuals reproduces the discrepancy,
  matching the maximized dual functional ``-rhs . beta``.

Note on orientation: the overshoot-minus-undershoot sum of ``beta * value``
equals *minus* the discrepancy; the identity holds with the undershoot sum
first.  ``verify_identities`` records this in its notes rather than
silently flipping a sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import matrix_rank_estimate
from .errors import DegenerateCase, PreconditionError
from .fitting import FitResult, ProblemInstance, assemble_primal
from .lp import FEAS_TOL, OPTIMAL, LpSolution

# Multipliers below this are treated as zero in complementarity checks.
BETA_NONZERO_TOL = 1e-9
# A nonzero multiplier must sit on a row tight within this (scaled) slack.
TIGHT_ROW_TOL = 1e-7
# Sum-to-one and half/half checks.
SUM_TOL = 1e-9


def _certificate_tolerance(discrepancy: float) -> float:
    # Identity residuals are sums of n products of order-one quantities.
    return 1e-8 * max(1.0, discrepancy)


@dataclass
class DualCertificate:
    """Nonnegative row multipliers of a solved fit, split by row parity."""

    beta: np.ndarray
    overshoot_sum: float
    undershoot_sum: float
    dual_objective: float

    @property
    def total(self) -> float:
        return self.overshoot_sum + self.undershoot_sum


@dataclass
class CertificateReport:
    """Numeric residuals of every certificate identity, plus pass flags."""

    strong_duality_gap: float
    beta_sum_residual: float
    value_sum_gap: float
    orthogonality_residuals: np.ndarray
    combined_orthogonality_residual: float
    residual_pairing_gap: float
    complementarity_violations: int
    active_point_count: int
    active_count_ok: bool
    two_sided_ok: bool | None
    identities_ok: bool
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "strong_duality_gap": self.strong_duality_gap,
            "beta_sum_residual": self.beta_sum_residual,
            "value_sum_gap": self.value_sum_gap,
            "orthogonality_residuals": [float(v) for v in self.orthogonality_residuals],
            "combined_orthogonality_residual": self.combined_orthogonality_residual,
            "residual_pairing_gap": self.residual_pairing_gap,
            "complementarity_violations": self.complementarity_violations,
            "active_point_count": self.active_point_count,
            "active_count_ok": self.active_count_ok,
            "two_sided_ok": self.two_sided_ok,
            "identities_ok": self.identities_ok,
            "notes": list(self.notes),
        }


def _require_analyzable(discrepancy: float, instance: ProblemInstance):
    if discrepancy <= FEAS_TOL:
        raise DegenerateCase(
            "exact interpolation (discrepancy ~ 0): certificates are not "
            "defined for this case"
        )
    scaled_design, _ = instance.scaled_design_and_values()
    if matrix_rank_estimate(scaled_design) < instance.m:
        raise DegenerateCase("rank-deficient design: certificates are not defined")


def extract_certificate(
    solution: LpSolution, instance: ProblemInstance
) -> DualCertificate:
    """Pull the row multipliers out of a solved fit LP.

    Raises DegenerateCase on exact interpolation or a rank-deficient
    design, and PreconditionError when the solution is not optimal.
    """
    if solution.status != OPTIMAL:
        raise PreconditionError(
            f"certificate extraction needs an optimal solve, got {solution.status}"
        )
    if solution.dual is None or len(solution.dual) != 2 * instance.n:
        raise PreconditionError("solution does not belong to this instance")
    _require_analyzable(float(solution.objective_value), instance)
    beta = solution.dual.copy()
    return DualCertificate(
        beta=beta,
        overshoot_sum=float(np.sum(beta[0::2])),
        undershoot_sum=float(np.sum(beta[1::2])),
        dual_objective=float(solution.dual_objective),
    )


def verify_identities(
    cert: DualCertificate, fit_result: FitResult, instance: ProblemInstance
) -> CertificateReport:
    """Evaluate every certificate identity numerically.

    All residual fields are magnitudes; ``identities_ok`` aggregates them at
    the certificate tolerance.  The fabricated-certificate path is
    supported: a beta that fails an identity shows up as a large residual,
    not an exception.
    """
    if len(cert.beta) != 2 * instance.n:
        raise PreconditionError("certificate does not match the instance size")
    if len(fit_result.coefficients) != instance.m:
        raise PreconditionError("fit does not match the instance size")
    _require_analyzable(fit_result.discrepancy, instance)

    g, y = instance.scaled_design_and_values()
    alpha = fit_result.coefficients
    d = fit_result.discrepancy
    b_over = cert.beta[0::2]
    b_under = cert.beta[1::2]
    fitted = g @ alpha
    tol = _certificate_tolerance(d)

    strong_duality_gap = abs(cert.dual_objective - d)
    beta_sum_residual = abs(float(np.sum(cert.beta)) - 1.0)

    # Optimal-value identity; holds with the undershoot sum leading.  The
    # overshoot-leading orientation comes out at -d.
    value_sum = float(b_under @ y - b_over @ y)
    value_sum_gap = abs(value_sum - d)

    orthogonality = g.T @ (b_over - b_under)
    combined = float(alpha @ orthogonality)

    pairing = float(b_over @ (fitted - y) + b_under @ (y - fitted))
    residual_pairing_gap = abs(pairing - d)

    lp = assemble_primal(instance)
    primal = np.append(alpha, d)
    slack = lp.rhs - lp.constraint_matrix @ primal
    row_scale = np.maximum(1.0, np.abs(lp.rhs))
    violations = int(
        np.sum((cert.beta > BETA_NONZERO_TOL) & (slack > TIGHT_ROW_TOL * row_scale))
    )

    active_count = len(fit_result.active_points)
    active_count_ok = check_active_point_count(fit_result, instance.m)

    two_sided: bool | None
    try:
        two_sided = check_two_sided(fit_result, cert)
    except PreconditionError:
        two_sided = None

    identities_ok = (
        strong_duality_gap <= tol
        and beta_sum_residual <= SUM_TOL
        and value_sum_gap <= tol
        and float(np.max(np.abs(orthogonality))) <= tol
        and abs(combined) <= tol
        and residual_pairing_gap <= tol
        and violations == 0
        and np.all(cert.beta >= -BETA_NONZERO_TOL)
    )

    notes = (
        "value sums follow the undershoot-minus-overshoot orientation; "
        "the reversed orientation equals minus the discrepancy",
    )
    return CertificateReport(
        strong_duality_gap=strong_duality_gap,
        beta_sum_residual=beta_sum_residual,
        value_sum_gap=value_sum_gap,
        orthogonality_residuals=np.abs(orthogonality),
        combined_orthogonality_residual=abs(combined),
        residual_pairing_gap=residual_pairing_gap,
        complementarity_violations=violations,
        active_point_count=active_count,
        active_count_ok=active_count_ok,
        two_sided_ok=two_sided,
        identities_ok=bool(identities_ok),
        notes=notes,
    )


def check_active_point_count(fit_result: FitResult, m: int) -> bool:
    """True when at least m + 1 points sit at the discrepancy, all of them
    within the active tolerance.

    This is the vertex structure of the fit: with m + 1 unknowns, an
    optimal basic solution pins that many rows.
    """
    instance = fit_result.instance
    _require_analyzable(fit_result.discrepancy, instance)
    active = fit_result.active_points
    if len(active) < m + 1:
        return False
    gaps = np.abs(
        np.abs(fit_result.scaled_residuals[list(active)]) - fit_result.discrepancy
    )
    return bool(np.max(gaps) <= fit_result.active_tol)


def check_two_sided(fit_result: FitResult, cert: DualCertificate) -> bool:
    """True when the fit overshoots somewhere and undershoots somewhere,
    and the certificate splits its mass evenly across the two row families.

    Requires the first basis function to be identically one on the data
    (the constant lets the fit slide vertically until both sides touch);
    raises PreconditionError otherwise.
    """
    instance = fit_result.instance
    g, _ = instance.scaled_design_and_values()
    if np.max(np.abs(g[:, 0] - 1.0)) > 1e-12:
        raise PreconditionError(
            "the two-sided check needs the first basis function to be "
            "identically 1 on the evaluation points"
        )
    _require_analyzable(fit_result.discrepancy, instance)

    d = fit_result.discrepancy
    tol = fit_result.active_tol
    scaled = fit_result.scaled_residuals
    has_undershoot = bool(np.any(scaled >= d - tol))
    has_overshoot = bool(np.any(scaled <= -d + tol))
    halves = (
        abs(cert.overshoot_sum - 0.5) <= SUM_TOL
        and abs(cert.undershoot_sum - 0.5) <= SUM_TOL
    )
    return has_overshoot and has_undershoot and halves
