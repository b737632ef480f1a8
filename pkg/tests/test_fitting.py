"""Tests for LP assembly and the minimax fit.

Expected values for the small cases were derived by hand from the witness
systems: residuals at m+1 active points sit at +-d, which gives a square
linear system in (coefficients, d).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equifit.basis import parse_basis_spec
from equifit.fitting import (
    ProblemInstance,
    assemble_primal,
    fit,
    objective_value,
)


def constant_instance():
    return ProblemInstance(
        points=[[0.0], [1.0]],
        values=[0.0, 1.0],
        basis=parse_basis_spec("1", 1),
    )


def hat_instance():
    return ProblemInstance(
        points=[[0.0], [1.0], [2.0]],
        values=[0.0, 1.0, 0.0],
        basis=parse_basis_spec("1, x", 1),
    )


def parabola_sample_instance():
    return ProblemInstance(
        points=[[0.0], [0.5], [1.0]],
        values=[0.0, 0.25, 1.0],
        basis=parse_basis_spec("1, x", 1),
    )


def test_assemble_single_point_rows():
    instance = ProblemInstance(
        points=[[0.0]], values=[5.0], basis=parse_basis_spec("1", 1)
    )
    lp = assemble_primal(instance)
    assert lp.constraint_matrix.tolist() == [[1.0, -1.0], [-1.0, -1.0]]
    assert lp.rhs.tolist() == [5.0, -5.0]
    assert lp.objective.tolist() == [0.0, 1.0]


def test_unit_weights_assemble_identically():
    plain = hat_instance()
    weighted = ProblemInstance(
        points=plain.points,
        values=plain.values,
        basis=plain.basis,
        weights=[1.0, 1.0, 1.0],
    )
    a, b = assemble_primal(plain), assemble_primal(weighted)
    assert np.array_equal(a.constraint_matrix, b.constraint_matrix)
    assert np.array_equal(a.rhs, b.rhs)


def test_weight_scales_one_row_pair():
    instance = ProblemInstance(
        points=[[0.0], [1.0]],
        values=[1.0, 2.0],
        basis=parse_basis_spec("1", 1),
        weights=[2.0, 1.0],
    )
    lp = assemble_primal(instance)
    # Point 0's pair is doubled in the design entries and the rhs; the bound
    # column stays -1.
    assert lp.constraint_matrix.tolist() == [
        [2.0, -1.0],
        [-2.0, -1.0],
        [1.0, -1.0],
        [-1.0, -1.0],
    ]
    assert lp.rhs.tolist() == [2.0, -2.0, 2.0, -2.0]


def test_constant_fit_balances_two_values():
    result = fit(constant_instance())
    assert result.coefficients == pytest.approx([0.5], abs=1e-9)
    assert result.discrepancy == pytest.approx(0.5, abs=1e-9)
    assert result.residuals == pytest.approx([-0.5, 0.5], abs=1e-9)
    assert result.active_points == (0, 1)
    assert not result.exact_interpolation
    assert not result.low_rank


def test_hat_fit_is_flat_midline():
    result = fit(hat_instance())
    assert result.coefficients == pytest.approx([0.5, 0.0], abs=1e-9)
    assert result.discrepancy == pytest.approx(0.5, abs=1e-9)
    assert result.residuals == pytest.approx([-0.5, 0.5, -0.5], abs=1e-9)
    assert len(result.active_points) == 3


def test_parabola_sample_fit():
    result = fit(parabola_sample_instance())
    assert result.coefficients == pytest.approx([-0.125, 1.0], abs=1e-9)
    assert result.discrepancy == pytest.approx(0.125, abs=1e-9)
    assert result.residuals == pytest.approx([0.125, -0.125, 0.125], abs=1e-9)


def test_weighted_constant_fit():
    instance = ProblemInstance(
        points=[[0.0], [1.0]],
        values=[0.0, 1.0],
        basis=parse_basis_spec("1", 1),
        weights=[2.0, 1.0],
    )
    result = fit(instance)
    # Balance equation 2|a| = |1 - a| gives a = 1/3, d = 2/3.
    assert result.coefficients == pytest.approx([1.0 / 3.0], abs=1e-9)
    assert result.discrepancy == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_exact_interpolation_flagged():
    instance = ProblemInstance(
        points=[[0.0], [1.0]],
        values=[3.0, 3.0],
        basis=parse_basis_spec("1", 1),
    )
    result = fit(instance)
    assert result.exact_interpolation
    assert result.discrepancy == pytest.approx(0.0, abs=1e-9)


def test_low_rank_flagged():
    instance = ProblemInstance(
        points=[[0.0], [1.0], [2.0]],
        values=[0.0, 1.0, 0.5],
        basis=parse_basis_spec("x, 2*x", 1),
    )
    result = fit(instance)
    assert result.low_rank


def test_objective_value_consistency():
    instance = hat_instance()
    result = fit(instance)
    assert objective_value(instance, result.coefficients) == pytest.approx(
        result.discrepancy, abs=1e-9
    )


def test_objective_value_zero_coefficients():
    instance = constant_instance()
    assert objective_value(instance, [0.0]) == pytest.approx(1.0)


def test_random_coefficients_never_beat_the_fit():
    rng = np.random.default_rng(11)
    instance = parabola_sample_instance()
    best = fit(instance).discrepancy
    for _ in range(1000):
        candidate = rng.uniform(-3, 3, size=2)
        assert objective_value(instance, candidate) >= best - 1e-9


@given(
    st.floats(0, 1),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2),
    st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2),
)
@settings(max_examples=200, deadline=None)
def test_objective_is_convex_in_coefficients(t, alpha, beta):
    instance = hat_instance()
    alpha = np.array(alpha)
    beta = np.array(beta)
    mixed = objective_value(instance, t * alpha + (1 - t) * beta)
    bound = t * objective_value(instance, alpha) + (1 - t) * objective_value(
        instance, beta
    )
    assert mixed <= bound + 1e-12


def test_translation_covariance_with_constant_in_basis():
    rng = np.random.default_rng(3)
    points = np.sort(rng.uniform(0, 1, 12)).reshape(-1, 1)
    values = np.sin(3 * points[:, 0]) + 0.1 * rng.standard_normal(12)
    basis = parse_basis_spec("1, x, x^2", 1)
    base = fit(ProblemInstance(points=points, values=values, basis=basis))
    shifted = fit(
        ProblemInstance(points=points, values=values + 2.5, basis=basis)
    )
    assert shifted.discrepancy == pytest.approx(base.discrepancy, abs=1e-9)
    assert shifted.coefficients[0] == pytest.approx(
        base.coefficients[0] + 2.5, abs=1e-9
    )
    assert shifted.coefficients[1:] == pytest.approx(
        base.coefficients[1:], abs=1e-9
    )


def test_scale_covariance():
    instance = parabola_sample_instance()
    base = fit(instance)
    scaled = fit(
        ProblemInstance(
            points=instance.points,
            values=3.0 * instance.values,
            basis=instance.basis,
        )
    )
    assert scaled.discrepancy == pytest.approx(3.0 * base.discrepancy, abs=1e-9)
    assert scaled.coefficients == pytest.approx(
        3.0 * base.coefficients, abs=1e-8
    )


def test_weighted_fit_matches_prescaled_unweighted_fit():
    rng = np.random.default_rng(5)
    points = np.sort(rng.uniform(0, 1, 10)).reshape(-1, 1)
    values = np.cos(2 * points[:, 0]) + 0.05 * rng.standard_normal(10)
    weights = rng.uniform(0.1, 10.0, 10)
    basis = parse_basis_spec("1, x", 1)
    weighted = fit(
        ProblemInstance(points=points, values=values, basis=basis, weights=weights)
    )
    g = weighted.instance.design()
    prescaled = fit(
        ProblemInstance(
            points=points,
            values=weights * values,
            basis=basis,
            design_override=weights[:, None] * g,
        )
    )
    assert weighted.coefficients == pytest.approx(prescaled.coefficients, abs=1e-9)
    assert weighted.discrepancy == pytest.approx(prescaled.discrepancy, abs=1e-9)


def test_zero_weight_point_excluded_from_active_set():
    instance = ProblemInstance(
        points=[[0.0], [1.0], [2.0]],
        values=[0.0, 1.0, 100.0],
        basis=parse_basis_spec("1", 1),
        weights=[1.0, 1.0, 0.0],
    )
    result = fit(instance)
    assert result.discrepancy == pytest.approx(0.5, abs=1e-9)
    assert 2 not in result.active_points
