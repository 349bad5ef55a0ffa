"""
Tests for the keel and the corrected auxiliary fields.
"""

import numpy as np
import pytest

from gapstress.auxiliary import (
    ScalarKeel,
    aux_eval,
    aux_family,
    aux_field,
    aux_hessian,
    bridge,
    cancellation_terms,
    corrector_energy,
    keel_eval,
    lame_residual,
)
from gapstress.errors import DimensionMismatchError, OutOfChartError
from gapstress.geometry import gap_profile
from gapstress.models import InclusionPairGeometry, LameParams


def _fd_gradient(fn, x, h=1e-6):
    """Central differences of a vector function at one point; out[i, j] = d fn^i / d x_j."""
    cols = []
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((fn(x + e) - fn(x - e)) / (2 * h))
    return np.stack(cols, axis=-1)


class TestKeel:
    """Tests for the scalar keel."""

    def setup_method(self):
        self.g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=0.01, R=0.5)
        self.keel = ScalarKeel.from_geometry(self.g)
        self.prof = gap_profile(self.g)

    def test_bridge(self):
        """Test f(0) = f(1) = 0, f(1/2) = -1/8 and f' = t - 1/2."""
        f, fp = bridge(np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(f, [0.0, -0.125, 0.0], atol=1e-15)
        np.testing.assert_allclose(fp, [-0.5, 0.0, 0.5])

    def test_boundary_values(self):
        """Test u_bar = 0 on the lower surface and 1 on the upper one."""
        xp = np.array([[0.0], [0.2], [-0.35]])
        up, low = self.prof.surfaces(xp)
        v_up, _ = keel_eval(self.keel, np.column_stack([xp[:, 0], up]))
        v_low, _ = keel_eval(self.keel, np.column_stack([xp[:, 0], low]))
        np.testing.assert_allclose(v_up, 1.0, atol=1e-12)
        np.testing.assert_allclose(v_low, 0.0, atol=1e-12)

    def test_vertical_gradient(self):
        """Test d u_bar / d x_2 = 1 / delta."""
        x = np.array([[0.2, 0.001]])
        _, grad = keel_eval(self.keel, x)
        assert grad[0, 1] == pytest.approx(1.0 / (0.01 + 0.04))

    def test_mirror(self):
        """Test that the lower family uses 1 - u_bar."""
        mirror = ScalarKeel.from_geometry(self.g, mirror=True)
        x = np.array([[0.1, 0.002], [-0.3, -0.01]])
        v, g = keel_eval(self.keel, x)
        vm, gm = keel_eval(mirror, x)
        np.testing.assert_allclose(vm, 1.0 - v)
        np.testing.assert_allclose(gm, -g)

    def test_touching_keel(self):
        """Test that the touching keel has eps = 0 and is singular at the origin."""
        keel = ScalarKeel.from_geometry(self.g, touching=True)
        assert keel.profile.eps == 0.0
        with pytest.raises(OutOfChartError):
            keel_eval(keel, np.array([[0.0, 0.0]]))

    def test_outside_region(self):
        """Test that points inside an inclusion are refused."""
        with pytest.raises(OutOfChartError):
            keel_eval(self.keel, np.array([[0.0, 0.2]]))

    def test_dimension_mismatch(self):
        """Test that 3D points are refused by a 2D keel."""
        with pytest.raises(DimensionMismatchError):
            keel_eval(self.keel, np.zeros((1, 3)))


class TestAuxField:
    """Tests for u_1^alpha."""

    def setup_method(self):
        self.p = LameParams(lam=1.3, mu=0.7)
        self.g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=0.01, R=0.5)
        self.x = np.array([0.1, 0.002])

    def test_surface_values(self):
        """Test u_1^alpha = psi_alpha on the upper surface and 0 on the lower one."""
        prof = gap_profile(self.g)
        xp = np.array([[0.15]])
        up, low = prof.surfaces(xp)
        for a in aux_family(self.g, self.p):
            top = np.array([[0.15, up[0]]])
            bottom = np.array([[0.15, low[0]]])
            v_top, _ = aux_eval(a, top)
            v_bottom, _ = aux_eval(a, bottom)
            np.testing.assert_allclose(v_top, a.psi(top), atol=1e-12)
            np.testing.assert_allclose(v_bottom, 0.0, atol=1e-12)

    def test_gradient_matches_differences(self):
        """Test exact gradients against central differences."""
        for alpha in (1, 2, 3):
            a = aux_field(self.g, self.p, alpha)
            _, grad = aux_eval(a, self.x[None, :])
            fd = _fd_gradient(lambda y: aux_eval(a, y[None, :])[0][0], self.x)
            np.testing.assert_allclose(grad[0], fd, rtol=1e-5, atol=1e-6)

    def test_hessian_matches_differences(self):
        """Test exact Hessians against differences of the gradient."""
        for alpha in (1, 2):
            a = aux_field(self.g, self.p, alpha)
            hess = aux_hessian(a, self.x[None, :])[0]
            fd = _fd_gradient(lambda y: aux_eval(a, y[None, :])[1][0], self.x)
            np.testing.assert_allclose(hess, fd, rtol=1e-4, atol=1e-3)

    def test_corrector_coefficients(self):
        """Test (lambda+mu)/(lambda+2mu), (lambda+mu)/mu and no corrector for rotations."""
        fam = aux_family(self.g, self.p)
        assert fam[0].corrector_coefficient == pytest.approx(2.0 / 2.7)
        assert fam[1].corrector_coefficient == pytest.approx(2.0 / 0.7)
        assert not fam[2].has_corrector

    def test_cancellation(self):
        """Test that the delta^-2 terms cancel for alpha = 1."""
        a = aux_field(self.g, self.p, 1)
        x = np.array([[0.05, 0.001], [0.2, -0.01], [-0.3, 0.02]])
        t1, t2 = cancellation_terms(a, x)
        np.testing.assert_allclose(t1 + t2, 0.0, atol=1e-12 * np.max(np.abs(t1)))
        assert np.all(np.abs(t1) > 0)

    def test_residual_smaller_than_keel_alone(self):
        """Test that the corrector removes the leading part of the Lamé residual."""
        a = aux_field(self.g, self.p, 1)
        x = np.array([[0.1, 0.0]])
        corrected = np.abs(lame_residual(a, None, x)).max()
        keel_only = np.abs(cancellation_terms(a, x)[0]).max()
        assert corrected < 0.5 * keel_only

    def test_mirror_family(self):
        """Test that the lower family equals psi_alpha on the lower surface."""
        prof = gap_profile(self.g)
        _, low = prof.surfaces(np.array([[0.1]]))
        a = aux_field(self.g, self.p, 2, mirror=True)
        pt = np.array([[0.1, low[0]]])
        v, _ = aux_eval(a, pt)
        np.testing.assert_allclose(v, a.psi(pt), atol=1e-12)

    def test_parameter_dimension(self):
        """Test that 3D parameters are refused for a 2D geometry."""
        with pytest.raises(DimensionMismatchError):
            aux_field(self.g, self.p.with_dimension(3), 1)

    def test_alpha_range(self):
        """Test that alpha outside 1..3 is refused in 2D."""
        with pytest.raises(ValueError):
            aux_field(self.g, self.p, 4)


class TestAuxField3D:
    """Tests for the 3D family."""

    def setup_method(self):
        self.p = LameParams(lam=1.0, mu=1.0, d=3)
        self.g = InclusionPairGeometry(d=3, m=2, kappa=1.0, eps=0.01, R=0.5)

    def test_family_size(self):
        """Test six fields in 3D."""
        assert len(aux_family(self.g, self.p)) == 6

    def test_gradient_matches_differences(self):
        """Test the exact 3D gradient against central differences."""
        x = np.array([0.08, -0.05, 0.001])
        for alpha in (1, 3, 5):
            a = aux_field(self.g, self.p, alpha)
            _, grad = aux_eval(a, x[None, :])
            fd = _fd_gradient(lambda y: aux_eval(a, y[None, :])[0][0], x)
            np.testing.assert_allclose(grad[0], fd, rtol=1e-5, atol=1e-6)


class TestCorrectorEnergy:
    """Tests for the corrector energy."""

    def test_bounded_as_eps_decreases(self):
        """Test that the corrector energy stays O(1) while the gap closes."""
        p = LameParams(lam=1.0, mu=1.0)
        energies = []
        for eps in (0.01, 0.001):
            g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=eps, R=0.5)
            energies.append(corrector_energy(aux_field(g, p, 1)))
        assert all(np.isfinite(e) and e > 0 for e in energies)
        assert 0.5 < energies[1] / energies[0] < 2.0

    def test_rotation_has_no_corrector(self):
        """Test zero energy for alpha = 3."""
        g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=0.01, R=0.5)
        assert corrector_energy(aux_field(g, LameParams(lam=1.0, mu=1.0), 3)) == 0.0
