"""
Unit tests for the complex-wave metric family.
"""
import numpy as np
import pytest

from engine.errors import InvalidPointError
from engine.metric_family import (
    W1, W2, Z1, Z2, coupling_jets, eval_profile_b, hermitian_pairing, inverse_metric, is_flat, laplacian_target,
    make_point, metric_components, metric_convention_resolution, random_point, walker_coefficient, x_index,
    y_index,
)
from models.spec import MetricSpec, ProfileKind


@pytest.mark.unit
class TestProfile:
    """The coefficient b and its Laplacian."""

    def test_singular_profile_laplacian(self, singular_n0, rng):
        for _ in range(10):
            p = random_point(singular_n0, rng)
            b = eval_profile_b(singular_n0, p)
            assert float(b.laplacian()) == pytest.approx(laplacian_target(singular_n0, p), rel=1e-12)

    def test_singular_value_at_base_point(self, singular_n0):
        p = make_point(singular_n0, 1.0, 0.0)
        assert float(eval_profile_b(singular_n0, p).value) == pytest.approx(1.0)
        assert laplacian_target(singular_n0, p) == pytest.approx(4.0)

    def test_harmonic_extra_keeps_laplacian(self, singular_n2, rng):
        p = random_point(singular_n2, rng)
        b = walker_coefficient(singular_n2, p)
        assert float(b.laplacian()) == pytest.approx(laplacian_target(singular_n2, p), rel=1e-10)

    def test_cw_analog_constant_laplacian(self, cw_analog_n1, rng):
        p = random_point(cw_analog_n1, rng)
        assert float(walker_coefficient(cw_analog_n1, p).laplacian()) == pytest.approx(4.0)

    @pytest.mark.parametrize("fixture", ["singular_n1", "singular_n2", "cw_analog_n1"])
    def test_coupling_norms_added_to_g_ww(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        p = random_point(spec, rng)
        g = metric_components(spec, p).components
        norms = sum(
            eps * (g[x_index(a), W1] ** 2 + g[x_index(a), W2] ** 2)
            for a, eps in enumerate(spec.epsilons)
        )
        assert g[W1, W1] == pytest.approx(float(walker_coefficient(spec, p).value) + norms, rel=1e-12)
        assert g[W2, W2] == g[W1, W1]

    @pytest.mark.parametrize("fixture", ["singular_n1", "singular_n2", "cw_analog_n1"])
    def test_coupling_norms_are_subtracted_from_laplacian(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        p = random_point(spec, rng)
        b = eval_profile_b(spec, p)
        slope = 0.0
        for (r, s), eps in zip(coupling_jets(spec, p), spec.epsilons):
            rx, ry = r.gradient()
            slope += eps * (float(rx) ** 2 + float(ry) ** 2)
        assert float(b.laplacian()) == pytest.approx(laplacian_target(spec, p) + 4.0 * slope, rel=1e-9, abs=1e-9)

    def test_singular_set_rejected(self, singular_n0):
        with pytest.raises(InvalidPointError):
            eval_profile_b(singular_n0, make_point(singular_n0, 0.0, 0.0))

    def test_wrong_point_length_rejected(self, singular_n1):
        with pytest.raises(InvalidPointError):
            eval_profile_b(singular_n1, np.array([1.0, 0.0, 0.0, 0.0]))

    def test_flat_profile_validation(self):
        assert is_flat(MetricSpec(n=0, profile=ProfileKind(variant="flat")))
        with pytest.raises(ValueError):
            ProfileKind(variant="flat", b0=1.0)
        with pytest.raises(ValueError):
            ProfileKind(variant="singular", b0=0.0)


@pytest.mark.unit
class TestMetric:
    """Components, closed-form inverse and the Hermitian form."""

    def test_sampled_points_in_annulus(self, singular_n1, rng):
        for _ in range(20):
            p = random_point(singular_n1, rng, (0.5, 3.0))
            assert 0.5 <= np.hypot(p[W1], p[W2]) <= 3.0
            assert np.all(np.abs(p[2:]) <= 1.0)

    def test_components_at_base_point(self, singular_n0):
        g = metric_components(singular_n0, make_point(singular_n0, 1.0, 0.0)).components
        expected = np.array([
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ])
        np.testing.assert_allclose(g, expected)

    @pytest.mark.parametrize("fixture", ["singular_n0", "singular_n1", "singular_n2", "cw_analog_n1"])
    def test_closed_form_inverse(self, fixture, request, rng):
        spec = request.getfixturevalue(fixture)
        for _ in range(5):
            p = random_point(spec, rng)
            g = metric_components(spec, p).components
            ginv = inverse_metric(spec, p).components
            np.testing.assert_allclose(g @ ginv, np.eye(spec.dim), atol=1e-12)

    def test_signature(self, singular_n2, rng):
        g = metric_components(singular_n2, random_point(singular_n2, rng)).components
        eig = np.linalg.eigvalsh(g)
        assert (int(np.sum(eig < 0)), int(np.sum(eig > 0))) == singular_n2.signature

    def test_full_convention_chosen(self, singular_n1, rng):
        report = metric_convention_resolution(singular_n1, random_point(singular_n1, rng))
        assert report["chosen"] == "full"
        assert report["residuals"]["full"] <= 1e-12
        assert report["residuals"]["half"] > 0.1

    def test_coupling_entries(self, singular_n1):
        p = make_point(singular_n1, 1.0, 0.0, [0.0] * 4)
        g = metric_components(singular_n1, p).components
        # h(1) = -1 + 1 + 0.5 i, so r = 0 and s = -0.5
        assert g[x_index(0), W1] == pytest.approx(0.0)
        assert g[x_index(0), W2] == pytest.approx(-0.5)
        assert g[y_index(0), W1] == pytest.approx(0.5)
        assert g[y_index(0), y_index(0)] == 1.0

    def test_hermitian_form_reproduces_metric(self, singular_n2, rng):
        from engine.kahler import standard_J
        J = standard_J(singular_n2.n).matrix
        p = random_point(singular_n2, rng)
        g = metric_components(singular_n2, p).components
        for _ in range(5):
            X, Y = rng.standard_normal(singular_n2.dim), rng.standard_normal(singular_n2.dim)
            h = hermitian_pairing(singular_n2, p, X, Y)
            assert X @ g @ Y == pytest.approx(2.0 * h.real, abs=1e-10)
            assert X @ g @ J @ Y == pytest.approx(2.0 * h.imag, abs=1e-10)

    def test_null_directions(self, singular_n0, rng):
        g = metric_components(singular_n0, random_point(singular_n0, rng)).components
        assert g[Z1, Z1] == 0.0
        assert g[Z2, Z2] == 0.0
        assert g[Z1, Z2] == 0.0
