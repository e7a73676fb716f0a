"""
Unit tests for the exact transvection algebra, its K subalgebra and the K geodesics.
"""
import numpy as np
import pytest
import sympy

from engine import lie_model
from engine.errors import DegenerateBasis
from models.spec import Coupling, MetricSpec, ProfileKind


@pytest.mark.unit
class TestBracketTable:
    """Exact structure constants and the Jacobi identity."""

    @pytest.mark.parametrize("n", [0, 1, 2])
    @pytest.mark.parametrize("b_p, b0", [(1, 4), ("-1/2", -2), (3, "7/3"), (0.1, 4)])
    def test_jacobi_holds_exactly(self, n, b_p, b0):
        alg = lie_model.build_algebra(n, b_p, b0, (1, -1)[:n])
        assert lie_model.jacobi_residual(alg) == 0
        assert lie_model.jacobi_residual_float(alg.as_array()) <= 1e-12

    def test_floats_read_as_decimals(self):
        assert lie_model.exact(0.1) == sympy.Rational(1, 10)
        alg = lie_model.build_algebra(0, 0.1, 4)
        assert alg.lam == sympy.Rational(1, 5)
        assert alg.mu == 2

    def test_antisymmetric_lookup(self):
        alg = lie_model.build_algebra(1, 1, 4)
        w1, w2, z2 = alg.index("w1"), alg.index("w2"), alg.index("z2")
        assert alg.constant(w1, w2, z2) == -2
        assert alg.constant(w2, w1, z2) == 2
        assert alg.structure(w1, w1) == {}

    def test_xy_bracket_uses_sign(self):
        alg = lie_model.build_algebra(1, 1, 4, (-1,))
        x1, y1 = alg.index("x1"), alg.index("y1")
        assert alg.structure(x1, y1) == {lie_model.Z2_IDX: 2, lie_model.A_IDX: -2}

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            lie_model.build_algebra(2, 1, 4, (1,))
        alg = lie_model.build_algebra(0, 1, 4)
        with pytest.raises(ValueError):
            alg.set_bracket(1, 1, {2: 1})
        with pytest.raises(KeyError):
            alg.index("x1")

    def test_single_sign_flip_breaks_jacobi(self):
        alg = lie_model.build_algebra(1, 1, 4)
        mutated = lie_model.mutate_bracket(alg, "z1", "w2", "z2")
        assert mutated.constant(lie_model.Z1_IDX, lie_model.W2_IDX, lie_model.Z2_IDX) == 1
        assert alg.constant(lie_model.Z1_IDX, lie_model.W2_IDX, lie_model.Z2_IDX) == -1
        assert lie_model.jacobi_residual(mutated) > 0

    def test_flipping_zero_constant_rejected(self):
        alg = lie_model.build_algebra(0, 1, 4)
        with pytest.raises(ValueError):
            lie_model.mutate_bracket(alg, "A", "z1", "z2")

    def test_export(self):
        doc = lie_model.export_algebra(lie_model.build_algebra(1, "1/2", 4, (-1,)))
        assert doc["basis"] == ["A", "w1", "w2", "z1", "z2", "x1", "y1"]
        assert doc["parameters"] == {"n": 1, "b_p": "1/2", "b0": "4", "epsilons": [-1]}
        row = next(r for r in doc["brackets"] if (r["i"], r["j"], r["k"]) == ("w1", "w2", "A"))
        assert row["c"] == "-1"


@pytest.mark.unit
class TestStructure:
    """Solvable, not nilpotent, with a two-step nilradical."""

    @pytest.mark.parametrize("n, derived", [(0, [5, 3, 0]), (1, [7, 5, 1, 0]), (2, [9, 7, 1, 0])])
    def test_diagnostics(self, n, derived):
        info = lie_model.structure_diagnostics(lie_model.build_algebra(n, 1, 4))
        assert info["derived_series"] == derived
        assert info["solvable"]
        assert not info["nilpotent"]
        assert info["nilradical_dim"] == 2 * n + 3
        assert info["nilradical_is_ideal"]
        assert info["nilradical_two_step"]
        assert info["nilradical_contains_derived"]
        assert info["nilradical_maximal"]
        assert info["heisenberg_dim"] == 2 * n + 1
        assert info["heisenberg"]


@pytest.mark.unit
class TestKSubalgebra:
    """The two-dimensional subalgebra and its incomplete geodesics."""

    @pytest.mark.parametrize("b_p", [1.0, 2.25, -0.5])
    def test_k_subalgebra_checks(self, b_p):
        ks = lie_model.k_subalgebra(lie_model.build_algebra(1, b_p, 4))
        assert ks.k == pytest.approx(np.sqrt(abs(b_p)))
        assert ks.sign == (1 if b_p > 0 else -1)
        assert max(ks.checks().values()) <= 1e-12

    def test_k_subalgebra_needs_nonzero_b(self):
        with pytest.raises(DegenerateBasis):
            lie_model.k_subalgebra(lie_model.build_algebra(0, 0, 4))
        with pytest.raises(DegenerateBasis):
            lie_model.k_geodesic(0.0, (1.0, 0.0), 1.0)

    def test_forward_geodesic_completes(self):
        geo = lie_model.k_geodesic(1.0, (1.0, 0.0), 5.0)
        assert geo.flag == "completed"
        assert geo.c == pytest.approx(-1.0)
        fit = geo.fit_report(1.0)
        assert max(fit.values()) <= 1e-6

    @pytest.mark.parametrize("b_p", [1.0, 4.0])
    def test_geodesic_blows_up_at_k(self, b_p):
        k = np.sqrt(b_p)
        geo = lie_model.k_geodesic(b_p, (-1.0, 0.0), 2.0 * k)
        assert geo.flag == "BlowUp"
        assert geo.event_t <= k
        assert geo.event_t == pytest.approx(k, rel=1e-6)
        assert max(geo.fit_report(k).values()) <= 1e-6

    def test_y_component_closed_form(self):
        geo = lie_model.k_geodesic(1.0, (0.2, -0.6), 1.0)
        x_pred, y_pred = geo.closed_form(1.0)
        np.testing.assert_allclose(geo.y, y_pred, rtol=1e-7)
        np.testing.assert_allclose(geo.x, x_pred, rtol=1e-7)


@pytest.mark.unit
class TestGeometryAgreement:
    """Brackets recomputed from the structure tensor at the reference point."""

    def test_derived_algebra_matches_table(self, singular_n0):
        derived = lie_model.derive_algebra(singular_n0)
        assert derived.compare(lie_model.build_algebra(0, 1, 4)) == []
        assert derived.hol_residual <= 1e-10
        assert derived.jacobi() <= 1e-10

    def test_derived_algebra_with_vanishing_coupling(self):
        spec = MetricSpec(
            n=1, epsilons=(-1,), profile=ProfileKind(variant="singular", b0=4.0),
            couplings=(Coupling(coeffs=((-1.0, 0.0), (1.0, 0.0))),),
        )
        derived = lie_model.derive_algebra(spec)
        assert derived.compare(lie_model.build_algebra(1, 1, 4, (-1,))) == []

    def test_canonical_curvature(self, singular_n0):
        point = np.array([1.0, 0.0, 0.3, -0.1])
        cc = lie_model.canonical_curvature(singular_n0, point)
        assert max(cc.residuals().values()) <= 1e-10

    def test_matrix_table_diagnostic(self):
        alg = lie_model.build_algebra(1, 1, 4)
        report = lie_model.matrix_rep_check(alg)
        assert report["size"] == 7
        assert report["linearity"] <= 1e-12
        assert report["isotropy_entry"]
        total = len(report["matches"]) + len(report["anti_matches"]) + len(report["mismatches"])
        assert total == 21
