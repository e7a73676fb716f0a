"""
Unit tests for the infinitesimal holonomy algebra.
"""
import numpy as np
import pytest

from engine import holonomy
from engine.errors import DegenerateBasis
from engine.metric_family import W1, W2, Z1, Z2, laplacian_target, make_point, random_point
from models.spec import Coupling, MetricSpec, ProfileKind


@pytest.mark.unit
class TestSpans:
    """Span reduction relative to the largest singular value."""

    def test_reduce_span_drops_multiples(self):
        A = holonomy.standard_A(0)
        basis = holonomy.reduce_span([A, 3.0 * A, -0.5 * A])
        assert len(basis) == 1
        assert np.sum(basis[0] * basis[0]) == pytest.approx(1.0)

    def test_reduce_span_of_zero_matrices(self):
        assert holonomy.reduce_span([np.zeros((4, 4))]) == []
        assert holonomy.reduce_span([]) == []

    def test_coefficient_on(self):
        A = holonomy.standard_A(1)
        span = holonomy.EndoSpan.from_generators([2.0 * A])
        coeff, leftover = span.coefficient_on(A)
        assert abs(coeff) == pytest.approx(np.sqrt(2.0) / 2.0)
        assert leftover <= 1e-15


@pytest.mark.unit
class TestHolonomyAlgebra:
    """One-dimensional, nilpotent, J-commuting and g-skew."""

    @pytest.mark.parametrize("fixture", ["singular_n0", "singular_n1", "singular_n2", "cw_analog_n1"])
    def test_dimension_one(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        span = holonomy.infinitesimal_holonomy(spec, random_point(spec, rng), max_order=2)
        assert span.dim == 1
        assert span.dims_by_order == [1, 1, 1]
        assert span.stabilized

    def test_flat_has_trivial_holonomy(self):
        spec = MetricSpec(n=1, epsilons=(1,), profile=ProfileKind(variant="flat"), couplings=(Coupling(),))
        span = holonomy.infinitesimal_holonomy(spec, make_point(spec, 1.0, 0.0), max_order=1)
        assert span.dim == 0

    def test_order_out_of_range(self, singular_n0):
        with pytest.raises(ValueError):
            holonomy.infinitesimal_holonomy(singular_n0, make_point(singular_n0, 1.0, 0.0), max_order=3)

    def test_generator_is_multiple_of_A(self, singular_n2, rng):
        p = random_point(singular_n2, rng)
        R12 = holonomy.curvature_generator(singular_n2, p)
        expected = 0.5 * laplacian_target(singular_n2, p) * holonomy.standard_A(singular_n2.n)
        np.testing.assert_allclose(R12, expected, atol=1e-9 * max(1.0, np.max(np.abs(expected))))

    def test_A_entries(self):
        A = holonomy.standard_A(0)
        assert A[Z2, W1] == 1.0
        assert A[Z1, W2] == -1.0
        assert np.count_nonzero(A) == 2

    def test_generator_checks(self, singular_n1, rng):
        checks = holonomy.holonomy_checks(singular_n1, random_point(singular_n1, rng))
        assert max(checks.values()) <= 1e-12

    def test_curvature_endomorphisms_span(self, singular_n1, rng):
        span = holonomy.curvature_endomorphisms(singular_n1, random_point(singular_n1, rng))
        assert span.dims_by_order == [1]


@pytest.mark.unit
class TestInvariantSubspaces:
    """The 4-plane E, its orthogonal complement and the su(1,1) normal form."""

    def test_subspaces(self, singular_n2, rng):
        result = holonomy.invariant_subspaces(singular_n2, random_point(singular_n2, rng))
        assert result["E_dim"] == 4
        assert result["E_perp_dim"] == 2 * singular_n2.n
        assert result["A_E_outside"] == 0.0
        assert result["A_E_perp"] <= 1e-12

    @pytest.mark.parametrize("w, sign", [((1.0, 0.0), 1), ((0.4, -1.2), 1)])
    def test_normal_form_positive_b(self, singular_n0, w, sign):
        form = holonomy.su11_normal_form(singular_n0, make_point(singular_n0, *w))
        assert form.sign == sign
        expected = sign * np.array([[1j, 1j], [-1j, -1j]])
        np.testing.assert_allclose(form.normalized, expected, atol=1e-12)
        assert max(form.checks().values()) <= 1e-12

    def test_normal_form_negative_b(self, singular_n2):
        form = holonomy.su11_normal_form(singular_n2, make_point(singular_n2, 1.0, 0.0))
        assert form.sign == -1
        np.testing.assert_allclose(form.normalized, -np.array([[1j, 1j], [-1j, -1j]]), atol=1e-12)

    def test_degenerate_basis(self):
        spec = MetricSpec(n=0, profile=ProfileKind(variant="flat"))
        with pytest.raises(DegenerateBasis):
            holonomy.su11_normal_form(spec, make_point(spec, 1.0, 0.0))
