"""
Tests for the Lamé parameters, rigid motions and energy forms.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from gapstress.elasticity import (
    apply_lame,
    divergence,
    energy_density,
    rigid_basis,
    rigid_count,
    strain,
    traction_form,
)
from gapstress.elasticity.rigid import RigidMotion, rigid_values
from gapstress.errors import DimensionMismatchError, NonUnitNormalError, UnsupportedDimensionError
from gapstress.models import LameParams


class TestLameParams:
    """Tests for parameter validation."""

    def test_alias_and_derived(self):
        """Test the lambda alias and the derived combinations."""
        p = LameParams(**{"lambda": 2.0, "mu": 0.5})
        assert p.lam == 2.0
        assert p.lam2mu == pytest.approx(3.0)
        assert p.young == pytest.approx(0.5 * 7.0 / 2.5)
        assert p.n_rigid == 3

    def test_ellipticity(self):
        """Test that non-elliptic parameters are rejected."""
        with pytest.raises(ValidationError):
            LameParams(lam=1.0, mu=0.0)
        with pytest.raises(ValidationError):
            LameParams(lam=-1.5, mu=1.0)
        # d*lambda + 2mu > 0 allows mildly negative lambda
        assert LameParams(lam=-0.5, mu=1.0).mu == 1.0

    def test_dimension(self):
        """Test that only d = 2, 3 are accepted."""
        with pytest.raises(ValidationError):
            LameParams(lam=1.0, mu=1.0, d=4)
        assert LameParams(lam=1.0, mu=1.0).with_dimension(3).d == 3


class TestRigidMotions:
    """Tests for the rigid basis."""

    def test_counts(self):
        """Test d(d+1)/2 and the unsupported dimension."""
        assert rigid_count(2) == 3
        assert rigid_count(3) == 6
        with pytest.raises(UnsupportedDimensionError):
            rigid_count(1)

    def test_2d_rotation(self):
        """Test psi_3 = (-x_2, x_1) in 2D."""
        psi = RigidMotion(alpha=3, d=2)
        np.testing.assert_allclose(psi(np.array([0.3, -0.7])), [0.7, 0.3])

    def test_zero_strain(self):
        """Test that every basis element has a skew gradient."""
        for d in (2, 3):
            for psi in rigid_basis(d):
                np.testing.assert_allclose(strain(psi.gradient), 0.0, atol=1e-15)

    def test_3d_ordering(self):
        """Test translations first, then rotations for pairs (1,2), (1,3), (2,3)."""
        basis = rigid_basis(3)
        assert [b.pair for b in basis[:3]] == [None, None, None]
        assert [b.pair for b in basis[3:]] == [(0, 1), (0, 2), (1, 2)]

    def test_rigid_values_shape(self):
        """Test stacking of the basis at points."""
        x = np.random.default_rng(0).normal(size=(5, 2))
        assert rigid_values(2, x).shape == (3, 5, 2)


class TestEnergy:
    """Tests for the energy density and traction."""

    def setup_method(self):
        self.p2 = LameParams(lam=1.3, mu=0.7)
        self.p3 = LameParams(lam=1.3, mu=0.7, d=3)
        self.rng = np.random.default_rng(42)

    def _tensor_energy(self, p, gu, gv):
        eu, ev = strain(gu), strain(gv)
        return p.lam * np.trace(eu) * np.trace(ev) + 2 * p.mu * np.sum(eu * ev)

    def test_matches_tensor_form(self):
        """Test the expanded identities against lambda tr e tr e + 2 mu e:e."""
        for p, d in ((self.p2, 2), (self.p3, 3)):
            for _ in range(5):
                gu, gv = self.rng.normal(size=(d, d)), self.rng.normal(size=(d, d))
                assert energy_density(p, gu, gv) == pytest.approx(self._tensor_energy(p, gu, gv))

    def test_symmetric_and_rigid_kernel(self):
        """Test symmetry and that rigid gradients carry no energy."""
        gu, gv = self.rng.normal(size=(3, 3)), self.rng.normal(size=(3, 3))
        assert energy_density(self.p3, gu, gv) == pytest.approx(energy_density(self.p3, gv, gu))
        for psi in rigid_basis(3):
            assert energy_density(self.p3, psi.gradient, gu) == pytest.approx(0.0, abs=1e-14)

    def test_broadcasting(self):
        """Test vectorized evaluation over leading axes."""
        gu = self.rng.normal(size=(4, 6, 2, 2))
        out = energy_density(self.p2, gu, gu)
        assert out.shape == (4, 6)
        assert np.all(out > 0)

    def test_dimension_mismatch(self):
        """Test that a 3x3 gradient is refused for d = 2."""
        with pytest.raises(DimensionMismatchError):
            energy_density(self.p2, np.eye(3), np.eye(3))

    def test_traction(self):
        """Test the conormal derivative of a uniaxial strain."""
        gu = np.array([[1.0, 0.0], [0.0, 0.0]])
        t = traction_form(self.p2, gu, np.array([1.0, 0.0]))
        np.testing.assert_allclose(t, [self.p2.lam2mu, 0.0])
        t = traction_form(self.p2, gu, np.array([0.0, 1.0]))
        np.testing.assert_allclose(t, [0.0, self.p2.lam])

    def test_traction_requires_unit_normal(self):
        """Test that a non-unit normal is refused."""
        with pytest.raises(NonUnitNormalError):
            traction_form(self.p2, np.eye(2), np.array([1.0, 1.0]))

    def test_apply_lame_quadratic(self):
        """Test the operator on u = (x_2^2, x_1 x_2)."""
        # d_jk u^1: only d_22 u^1 = 2; d_12 u^2 = d_21 u^2 = 1
        h = np.zeros((2, 2, 2))
        h[0, 1, 1] = 2.0
        h[1, 0, 1] = h[1, 1, 0] = 1.0
        out = apply_lame(self.p2, h)
        # Lap u = (2, 0), grad div u = grad(x_1) = (1, 0)
        np.testing.assert_allclose(out, [2 * self.p2.mu + (self.p2.lam + self.p2.mu), 0.0])

    def test_divergence(self):
        """Test the trace helper."""
        assert divergence(np.diag([1.0, 2.0, 3.0])) == pytest.approx(6.0)
