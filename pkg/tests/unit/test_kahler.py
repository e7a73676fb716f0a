"""
Unit tests for the complex structure and the homogeneous structure tensor.
"""
import numpy as np
import pytest

from engine import kahler
from engine.errors import InvalidPointError
from engine.metric_family import W1, W2, Z1, Z2, make_point, metric_components, random_point


@pytest.mark.unit
class TestComplexStructure:
    """J, the Kahler form and the Levi-Civita connection."""

    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_standard_J_squares_to_minus_one(self, n):
        J = kahler.standard_J(n)
        assert J.dim == 2 * n + 4
        assert J.square_residual() == 0.0

    def test_J_pairs(self):
        J = kahler.standard_J(0).matrix
        assert J[W2, W1] == 1.0
        assert J[Z2, Z1] == 1.0
        assert J[Z1, Z2] == -1.0

    def test_negative_n_rejected(self):
        with pytest.raises(ValueError):
            kahler.standard_J(-1)

    @pytest.mark.parametrize("fixture", ["singular_n1", "singular_n2", "cw_analog_n1"])
    def test_kahler_identities(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        J = kahler.standard_J(spec.n)
        for _ in range(3):
            p = random_point(spec, rng)
            g = metric_components(spec, p).components
            assert J.hermitian_residual(g) <= 1e-12
            assert np.max(np.abs(kahler.d_omega(spec, p))) <= 1e-10
            assert kahler.levi_civita_J_residual(spec, p) <= 1e-9

    def test_kahler_form_is_skew(self, singular_n2, rng):
        omega = kahler.kahler_form(singular_n2, random_point(singular_n2, rng))
        np.testing.assert_allclose(omega, -omega.T, atol=1e-12)

    def test_split_coupling_breaks_kahler(self, broken_cr):
        p = make_point(broken_cr, 1.0, 0.5, [0.0, 0.0, 0.3, 0.2])
        assert kahler.cauchy_riemann_residual(broken_cr, p) == pytest.approx(1.0)
        assert kahler.levi_civita_J_residual(broken_cr, p) > 1e-6


@pytest.mark.unit
class TestStructureTensor:
    """S, xi and theta for the singular profile."""

    def test_xi_is_null(self, singular_n1, rng):
        p = random_point(singular_n1, rng)
        xi, theta = kahler.xi_and_theta(singular_n1, p)
        rho2 = p[W1] ** 2 + p[W2] ** 2
        assert xi[Z1] == pytest.approx(-p[W1] / rho2)
        assert xi[Z2] == pytest.approx(-p[W2] / rho2)
        assert abs(theta @ xi) <= 1e-14

    def test_xi_undefined_at_origin(self, singular_n0):
        with pytest.raises(InvalidPointError):
            kahler.xi_and_theta(singular_n0, np.zeros(4))

    @pytest.mark.parametrize("fixture", ["singular_n0", "singular_n1", "singular_n2"])
    def test_ambrose_singer_equations(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        for _ in range(3):
            residuals = kahler.ambrose_singer_residuals(spec, random_point(spec, rng))
            assert set(residuals) == {"nabla_g", "nabla_R", "nabla_S", "nabla_J", "nabla_xi", "nabla_theta"}
            assert max(residuals.values()) <= 1e-8

    def test_recurrence_identities(self, singular_n1, rng):
        identities = kahler.lemma_identities(singular_n1, random_point(singular_n1, rng))
        assert max(identities.values()) <= 1e-8

    def test_structure_class(self, singular_n2, rng):
        residual, theta_ext, gap = kahler.class_residual(singular_n2, random_point(singular_n2, rng))
        assert residual <= 1e-9
        assert gap <= 1e-9
        assert theta_ext.shape == (singular_n2.dim,)

    def test_isotropy_and_antisymmetry(self, singular_n0, rng):
        p = random_point(singular_n0, rng)
        hs = kahler.hom_structure(singular_n0, p)
        assert max(kahler.isotropy_residuals(hs).values()) <= 1e-14
        assert kahler.s_antisymmetry_residual(hs.S, metric_components(singular_n0, p).components) <= 1e-10
        np.testing.assert_array_equal(kahler.build_S(singular_n0, p), hs.S)


@pytest.mark.unit
class TestWalker:
    """The null distribution spanned by d_z1 and d_z2 is parallel."""

    @pytest.mark.parametrize("fixture", ["singular_n0", "singular_n2", "cw_analog_n1"])
    def test_walker_distribution(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        points = [random_point(spec, rng) for _ in range(5)]
        assert kahler.walker_check(spec, points)
