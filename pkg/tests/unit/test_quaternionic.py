"""
Unit tests for the flat pseudo-quaternionic model and the flatness argument.
"""
import numpy as np
import pytest
import sympy

from engine import quaternionic
from engine.errors import NonIsotropicXi


@pytest.mark.unit
class TestFlatModel:
    """J1, J2, J3 on R^{4p, 4q}."""

    @pytest.mark.parametrize("p, q", [(1, 1), (2, 1), (0, 2)])
    def test_quaternion_relations(self, p, q):
        triple = quaternionic.build_flat_model(p, q)
        assert triple.dim == 4 * (p + q)
        assert triple.signature == (4 * p, 4 * q)
        assert max(triple.residuals().values()) == 0.0

    def test_small_models_rejected(self):
        with pytest.raises(ValueError):
            quaternionic.build_flat_model(1, 0)
        with pytest.raises(ValueError):
            quaternionic.build_flat_model(-1, 3)

    def test_cayley_rotation_is_orthogonal(self):
        R = quaternionic.cayley_rotation(1, 2, 3)
        assert R.T * R == sympy.eye(3)
        assert R.det() == 1

    def test_four_form_is_rotation_invariant(self):
        triple = quaternionic.build_flat_model(1, 1)
        assert quaternionic.omega_rotation_residual(triple, seed=3) <= 1e-12
        rotated = quaternionic.rotate_triple(triple, quaternionic.cayley_rotation(1, 2, 3))
        assert max(rotated.residuals().values()) <= 1e-12


@pytest.mark.unit
class TestIsotropicVectors:
    """Null vectors and their rejection in definite signature."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_isotropic_vector(self, seed):
        triple = quaternionic.build_flat_model(2, 1)
        xi = quaternionic.isotropic_vector(2, 1, seed)
        v = np.array(xi, dtype=float)
        g, _ = triple.numeric()
        assert v @ g @ v == 0.0
        assert np.any(v)

    def test_default_xi(self):
        assert quaternionic.default_xi(1, 1) == [1, 0, 0, 0, 1, 0, 0, 0]

    def test_definite_signature_has_no_null_vector(self):
        with pytest.raises(NonIsotropicXi):
            quaternionic.default_xi(2, 0)
        with pytest.raises(NonIsotropicXi):
            quaternionic.isotropic_vector(0, 2)

    def test_non_null_xi_rejected(self):
        triple = quaternionic.build_flat_model(1, 1)
        with pytest.raises(NonIsotropicXi):
            quaternionic.qk_structure_S(triple, [1, 0, 0, 0, 0, 0, 0, 0])
        with pytest.raises(NonIsotropicXi):
            quaternionic.qk_structure_S(triple, [0] * 8)
        with pytest.raises(ValueError):
            quaternionic.qk_structure_S(triple, [1, 0, 0, 0, 1])


@pytest.mark.unit
class TestStructureTensor:
    """S of linear type on the flat model."""

    def test_metric_skew_and_nabla_xi(self):
        triple = quaternionic.build_flat_model(1, 1)
        xi = quaternionic.default_xi(1, 1)
        S = quaternionic.qk_structure_S(triple, xi)
        g, _ = triple.numeric()
        assert quaternionic.s_metric_skew_residual(S, g) <= 1e-12
        assert quaternionic.nabla_xi_residual(triple, xi, samples=20, seed=0) <= 1e-12

    def test_xi_along_itself(self):
        triple = quaternionic.build_flat_model(1, 1)
        xi = quaternionic.default_xi(1, 1)
        S = quaternionic.qk_structure_S(triple, xi)
        v = np.array(xi, dtype=float)
        assert np.max(np.abs(np.einsum("kij,i,j->k", S, v, v))) <= 1e-12

    def test_flat_commutator(self, rng):
        triple = quaternionic.build_flat_model(1, 1)
        xi = quaternionic.default_xi(1, 1)
        for _ in range(5):
            X, Y = rng.standard_normal(8), rng.standard_normal(8)
            assert quaternionic.flat_commutator_residual(triple, xi, X, Y) <= 1e-9


@pytest.mark.unit
class TestWedgeKernel:
    """Exact kernel dimensions of the wedge constraints."""

    def test_kernel_dimensions(self):
        triple = quaternionic.build_flat_model(1, 1)
        xi = quaternionic.default_xi(1, 1)
        dims = {
            name: quaternionic.wedge_kernel_dimension(quaternionic.wedge_system(triple, xi, name))
            for name in quaternionic.CONSTRAINT_SETS
        }
        assert dims == {"full": 0, "theta_only": 7, "theta_J1": 1, "theta_zero": 28}

    def test_twelve_dimensional_kernel(self):
        triple = quaternionic.build_flat_model(2, 1)
        xi = quaternionic.isotropic_vector(2, 1, seed=5)
        system = quaternionic.wedge_system(triple, xi)
        assert system.constraint_rank() == 4
        assert quaternionic.wedge_kernel_dimension(system) == 0

    def test_unknown_constraint_set(self):
        triple = quaternionic.build_flat_model(1, 1)
        with pytest.raises(ValueError):
            quaternionic.wedge_system(triple, quaternionic.default_xi(1, 1), "theta_J2")

    def test_degenerate_system(self):
        triple = quaternionic.build_flat_model(1, 1)
        system = quaternionic.wedge_system(triple, quaternionic.default_xi(1, 1), "theta_zero")
        assert system.degenerate
        assert system.constraint_rank() == 0


@pytest.mark.unit
class TestFlatness:
    """The chained argument forces flatness only with all three complex structures."""

    def test_quaternionic_forces_flat(self):
        report = quaternionic.flatness_report(1, 1)
        assert report["forces_flat"]
        assert report["nu_forced_zero"]
        assert report["constraint_rank"] == 4
        assert report["hyper_kahler"]["forces_flat"]
        assert report["xi"] == [1, 0, 0, 0, 1, 0, 0, 0]

    def test_control_does_not_force_flat(self):
        report = quaternionic.flatness_report(1, 1, quaternionic=False)
        assert not report["forces_flat"]
        assert report["kernel_dims"]["theta_J1"] == 1

    def test_nu_forcing(self):
        triple = quaternionic.build_flat_model(1, 2)
        result = quaternionic.nu_q_forcing(triple, quaternionic.default_xi(1, 2))
        assert result == {"solution_dim": 0, "forced_zero": True}

    def test_kernel_invariant_under_rotation_and_scaling(self):
        triple = quaternionic.build_flat_model(1, 1)
        rotated = quaternionic.rotate_triple(triple, quaternionic.cayley_rotation(1, 2, 3))
        xi = quaternionic.default_xi(1, 1)
        assert quaternionic.wedge_kernel_dimension(quaternionic.wedge_system(rotated, xi)) == 0
        scaled = [3 * x for x in xi]
        assert quaternionic.wedge_kernel_dimension(quaternionic.wedge_system(triple, scaled)) == 0
