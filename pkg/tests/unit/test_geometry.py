"""
Unit tests for the tensor calculus engine on the complex-wave family.
"""
import numpy as np
import pytest

from engine import geometry
from engine.metric_family import (
    W1, W2, Z1, Z2, laplacian_target, make_point, metric_derivatives, random_point,
)


@pytest.mark.unit
class TestCurvature:
    """Riemann tensor, Ricci flatness and the curvature formula."""

    @pytest.mark.parametrize("fixture", ["singular_n0", "singular_n1", "singular_n2", "cw_analog_n1"])
    def test_ricci_flat(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        for _ in range(5):
            p = random_point(spec, rng)
            assert geometry.ricci(spec, p).max_abs() <= 1e-9

    def test_reference_curvature_value(self, singular_n0):
        Rm = geometry.riemann(singular_n0, make_point(singular_n0, 1.0, 0.0)).components
        assert Rm[W1, W2, W1, W2] == pytest.approx(2.0, abs=1e-12)

    def test_curvature_formula_with_couplings(self, singular_n2, rng):
        for _ in range(5):
            p = random_point(singular_n2, rng)
            Rm = geometry.riemann(singular_n2, p).components
            assert Rm[W1, W2, W1, W2] == pytest.approx(0.5 * laplacian_target(singular_n2, p), rel=1e-9)

    def test_symmetries_and_bianchi(self, singular_n1, rng):
        p = random_point(singular_n1, rng)
        cd = geometry.curvature_data(metric_derivatives(singular_n1, p))
        assert max(geometry.riemann_symmetry_residual(cd.Rm).values()) <= 1e-9
        assert geometry.second_bianchi_residual(cd.nabla_R) <= 1e-9

    def test_cw_analog_is_locally_symmetric(self, cw_analog_n1, rng):
        p = random_point(cw_analog_n1, rng)
        assert geometry.nabla_riemann(cw_analog_n1, p).max_abs() <= 1e-10

    def test_singular_is_not_locally_symmetric(self, singular_n0):
        p = make_point(singular_n0, 1.0, 0.0)
        assert geometry.nabla_riemann(singular_n0, p).max_abs() > 1.0


@pytest.mark.unit
class TestChristoffel:
    """Closed-form and finite-difference cross-checks."""

    def test_closed_form_symbols(self, singular_n2, rng):
        p = random_point(singular_n2, rng)
        assert geometry.christoffel_closed_form_residual(singular_n2, p) <= 1e-9

    def test_finite_difference(self, singular_n1, rng):
        p = random_point(singular_n1, rng)
        assert geometry.christoffel_fd_residual(singular_n1, p) <= 1e-6

    def test_w_components_vanish(self, singular_n1, rng):
        gamma = geometry.christoffel(singular_n1, random_point(singular_n1, rng)).components
        assert np.max(np.abs(gamma[[W1, W2]])) <= 1e-12


@pytest.mark.unit
class TestInvariantsAndJacobi:
    """VSI and 2-step nilpotent Jacobi operators."""

    def test_invariants_vanish_to_second_order(self, singular_n1, rng):
        p = random_point(singular_n1, rng)
        invariants = geometry.scalar_invariants(singular_n1, p, 2)
        assert "box_riemann_dot_riemann" in invariants
        assert max(abs(v) for v in invariants.values()) <= 1e-9

    def test_unknown_order_rejected(self, singular_n0):
        with pytest.raises(ValueError):
            geometry.scalar_invariants(singular_n0, make_point(singular_n0, 1.0, 0.0), 5)

    def test_jacobi_operators_square_to_zero(self, singular_n2, rng):
        p = random_point(singular_n2, rng)
        for _ in range(5):
            M = geometry.jacobi_operator(singular_n2, p, rng.standard_normal(singular_n2.dim)).components
            assert np.max(np.abs(M @ M)) <= 1e-9 * max(1.0, np.max(np.abs(M)) ** 2)

    def test_reference_jacobi_matrix(self, singular_n0):
        X = np.zeros(4)
        X[W1] = 1.0
        p = make_point(singular_n0, 1.0, 0.0)
        M = geometry.jacobi_operator(singular_n0, p, X).components
        expected = np.zeros((4, 4))
        expected[Z2, W2] = -2.0     # -b0 / (2 rho^4)
        np.testing.assert_allclose(M, expected, atol=1e-10)
