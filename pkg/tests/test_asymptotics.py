"""
Tests for the closed-form asymptotic laws.
"""

import math

import numpy as np
import pytest

from gapstress.asymptotics import (
    a11_leading,
    anisotropy,
    blowup_matrix,
    blowup_ridge,
    c_diff_leading,
    capacity_leading,
    cell_kappa,
    composed_gradient_coefficients,
    displayed_gradient_coefficients,
    displayed_ratio,
    effective_moduli,
    g_closed_form,
    g_integral,
    grad_u_asymptotic,
    leading_alphas,
    near_origin_gradient,
    q_closed_form,
    q_converges,
    q_integral,
    q_table,
    rate,
    rate_e,
    rate_f,
    rho_d,
    rho_md,
    rotational_blowup_matrix,
)
from gapstress.errors import (
    DimensionMismatchError,
    DivergentIntegralError,
    OutOfChartError,
    UncoveredCaseError,
    UnsupportedDimensionError,
)
from gapstress.geometry import gap_profile
from gapstress.models import InclusionPairGeometry, LameParams


class TestQIntegrals:
    """Tests for Q_{d,m} and Q~_{d,m}."""

    @pytest.mark.parametrize("d,m", [(2, 2), (2, 3), (2, 4), (2, 6), (3, 3), (3, 4), (3, 8)])
    def test_closed_forms(self, d, m):
        """Test quadrature against 2 pi / (m sin(s pi / m))."""
        for tilde in (False, True):
            if q_converges(d, m, tilde):
                assert abs(q_integral(d, m, tilde) - q_closed_form(d, m, tilde)) <= 1e-9

    def test_known_values(self):
        """Test Q_{2,2} = pi and Q_{3,4} = pi / 2."""
        assert q_integral(2, 2) == pytest.approx(math.pi, abs=1e-10)
        assert q_closed_form(3, 4) == pytest.approx(math.pi / 2)

    def test_divergent(self):
        """Test that m <= s is refused."""
        assert not q_converges(3, 2)
        with pytest.raises(DivergentIntegralError):
            q_integral(3, 2)
        with pytest.raises(DivergentIntegralError):
            q_closed_form(2, 3, tilde=True)

    def test_table(self):
        """Test that divergent entries of the table are None."""
        t = q_table(2, 3)
        assert t.q is not None and t.q_closed is not None
        assert t.q_tilde is None and t.q_tilde_closed is None

    def test_unsupported_dimension(self):
        """Test that d = 4 is refused."""
        with pytest.raises(UnsupportedDimensionError):
            q_integral(4, 6)


class TestRates:
    """Tests for the rate functions."""

    def test_rho_d(self):
        """Test sqrt(eps) in 2D and 1/|log eps| in 3D."""
        assert rho_d(2, 0.01) == pytest.approx(0.1)
        assert rho_d(3, 0.01) == pytest.approx(1 / math.log(100))

    def test_rho_md_table(self):
        """Test every branch of the relative error table."""
        eps = 0.01
        log_eps = math.log(100)
        assert rho_md(2, 2, eps) is None
        assert rho_md(2, 3, eps) == pytest.approx(1 / log_eps)
        assert rho_md(2, 4, eps) == pytest.approx(eps ** 0.25)
        assert rho_md(2, 7, eps) == 0.0
        assert rho_md(3, 3, eps) is None
        assert rho_md(3, 4, eps) == pytest.approx(1 / log_eps)
        assert rho_md(3, 6, eps) == pytest.approx(eps ** (1 / 3))
        assert rho_md(3, 8, eps) == 0.0

    def test_rho_md_monotone(self):
        """Test that the rates decrease with eps."""
        for d, m in ((2, 3), (2, 4), (3, 4), (3, 5)):
            assert rho_md(d, m, 0.001) < rho_md(d, m, 0.01)

    def test_rotational_rates(self):
        """Test E for m = 3 and F for m = 4."""
        assert rate_e(2.0, 0.01, 3) == pytest.approx(3.0 / math.log(100))
        assert rate_f(1.0, 0.01, 4) == pytest.approx(2 / (math.pi * math.log(100)))
        with pytest.raises(ValueError):
            rate_e(1.0, 0.01, 2)

    def test_eps_range(self):
        """Test that eps outside (0, 1/2) is refused."""
        with pytest.raises(ValueError):
            rho_d(2, 0.6)
        with pytest.raises(ValueError):
            rho_d(2, 0.0)

    def test_rate_bundle(self):
        """Test the undefined entries of the bundle."""
        r = rate(2, 2, 0.01)
        assert r.rho_md is None and r.e_rate is None and r.f_rate is None
        r = rate(3, 5, 0.01)
        assert r.f_rate is not None and r.e_rate is None


class TestCapacity:
    """Tests for the capacity laws."""

    def setup_method(self):
        self.p = LameParams(lam=1.0, mu=1.0)
        self.g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=0.01, R=0.5)

    def test_disks(self):
        """Test pi mu / sqrt(kappa eps) and pi (lambda+2mu) / sqrt(kappa eps)."""
        a1 = a11_leading(self.p, self.g, 1)
        a2 = a11_leading(self.p, self.g, 2)
        assert a1.value == pytest.approx(math.pi / 0.1)
        assert a2.value == pytest.approx(3 * math.pi / 0.1)
        assert a1.eps_power == -0.5
        assert a1.has_unknown_constant

    def test_m_convex_2d(self):
        """Test the m = 4 laws including the rotational capacity."""
        g = InclusionPairGeometry(d=2, m=4, kappa=0.5, eps=0.01, R=0.5)
        a1 = a11_leading(self.p, g, 1)
        assert a1.value == pytest.approx(q_integral(2, 4) / (0.5 ** 0.25 * 0.01 ** 0.75))
        a3 = a11_leading(self.p, g, 3)
        assert a3.eps_power == pytest.approx(-0.25)
        assert a3.value == pytest.approx(3 * q_integral(2, 4, True) / (0.5 ** 0.75 * 0.01 ** 0.25))

    def test_m3_logarithmic(self):
        """Test the |log eps| law of the rotational capacity for m = 3."""
        g = InclusionPairGeometry(d=2, m=3, kappa=1.0, eps=0.01, R=0.5)
        a3 = a11_leading(self.p, g, 3)
        assert a3.logarithmic
        assert a3.value == pytest.approx(2 * 3 / 3 * math.log(100))

    def test_3d_laws(self):
        """Test the 3D m = 2 logarithmic law and the m = 4 rotational laws."""
        p = LameParams(lam=1.0, mu=1.0, d=3)
        g = InclusionPairGeometry(d=3, m=2, kappa=1.0, eps=0.01, R=0.5)
        assert a11_leading(p, g, 1).value == pytest.approx(math.pi * math.log(100))
        assert a11_leading(p, g, 3).value == pytest.approx(3 * math.pi * math.log(100))
        g4 = g.model_copy(update={"m": 4})
        a4 = a11_leading(p, g4, 4)
        a5 = a11_leading(p, g4, 5)
        assert a4.logarithmic and a5.logarithmic
        assert a5.value / a4.value == pytest.approx(3 / 2)

    def test_uncovered(self):
        """Test that the rotational capacity has no law for d = 2, m = 2."""
        with pytest.raises(UncoveredCaseError):
            a11_leading(self.p, self.g, 3)
        assert leading_alphas(2, 2) == [1, 2]
        assert leading_alphas(3, 5) == [1, 2, 3, 4, 5, 6]

    def test_dimension_mismatch(self):
        """Test that 3D parameters are refused for a 2D geometry."""
        with pytest.raises(DimensionMismatchError):
            a11_leading(self.p.with_dimension(3), self.g, 1)

    def test_c_diff(self):
        """Test C_1 - C_2 = b* / a_11 with zeros outside the leading alphas."""
        b = np.array([2.0, -1.0, 5.0])
        c = c_diff_leading(self.p, self.g, b)
        np.testing.assert_allclose(c[:2], b[:2] / capacity_leading(self.p, self.g)[:2])
        assert c[2] == 0.0

    @pytest.mark.parametrize("d,m", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3), (3, 4), (3, 6)])
    def test_displayed_against_composed(self, d, m):
        """Test that displayed coefficients times the recorded ratio give 1/a_11."""
        p = LameParams(lam=1.4, mu=0.6, d=d)
        g = InclusionPairGeometry(d=d, m=m, kappa=1.3, eps=0.004, R=0.5)
        composed = composed_gradient_coefficients(p, g)
        shown = displayed_gradient_coefficients(p, g) * displayed_ratio(d, m)
        np.testing.assert_allclose(shown, composed, rtol=1e-12)

    def test_anisotropic_reduces_for_m2(self):
        """Test that kappa' = kappa reproduces the isotropic 3D law for m = 2."""
        p = LameParams(lam=1.0, mu=1.0, d=3)
        iso = InclusionPairGeometry(d=3, m=2, kappa=1.5, eps=0.01, R=0.5)
        aniso = iso.model_copy(update={"kappa_prime": 1.5})
        assert a11_leading(p, aniso, 1).value == pytest.approx(a11_leading(p, iso, 1).value)


class TestGradients:
    """Tests for the gradient formulas."""

    def setup_method(self):
        self.p = LameParams(lam=1.0, mu=1.0)
        self.g = InclusionPairGeometry(d=2, m=2, kappa=1.0, eps=0.01, R=0.5)

    def test_center_gradient(self):
        """Test the shear gradient 1/(pi sqrt(eps)) at the gap centre."""
        grad = grad_u_asymptotic(self.p, self.g, [1.0, 0.0, 0.0], np.zeros((1, 2)))[0]
        assert grad[0, 1] == pytest.approx(1 / (math.pi * 0.1))

    def test_near_origin_form(self):
        """Test that the simplified form agrees with the full formula at x = 0."""
        b = [1.0, 0.5, 0.0]
        x = np.zeros((1, 2))
        full = grad_u_asymptotic(self.p, self.g, b, x)[0]
        simple = near_origin_gradient(self.p, self.g, b, x)[0]
        assert simple[0, 1] == pytest.approx(full[0, 1])
        assert simple[1, 1] == pytest.approx(full[1, 1])

    @pytest.mark.parametrize("d,m", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 4)])
    def test_origin_last_column(self, d, m):
        """Test that the leading gradient over x' = 0 has entries in the last column only."""
        p = LameParams(lam=1.3, mu=0.7, d=d)
        g = InclusionPairGeometry(d=d, m=m, kappa=1.2, eps=0.01, R=0.5)
        b = np.linspace(1.0, 2.0, 3 * (d - 1))
        x = np.zeros((3, d))
        x[:, -1] = [-0.004, 0.0, 0.003]
        grad = grad_u_asymptotic(p, g, b, x)
        assert np.all(grad[..., :, :-1] == 0.0)
        assert np.all(np.abs(grad[1, :, -1]) > 0)

    def test_quarter_eps_doubles_shear_entry(self):
        """Test that eps -> eps/4 doubles the (1,2) entry at the gap centre."""
        b = [1.0, 0.3, 0.0]
        x = np.zeros((1, 2))
        coarse = grad_u_asymptotic(self.p, self.g, b, x)[0]
        fine = grad_u_asymptotic(self.p, self.g.with_eps(0.0025), b, x)[0]
        assert fine[0, 1] / coarse[0, 1] == pytest.approx(2.0, rel=1e-12)

    def test_zero_factors(self):
        """Test that vanishing blow-up factors give a zero gradient."""
        x = np.array([[0.0, 0.0], [0.1, 0.002]])
        assert np.all(grad_u_asymptotic(self.p, self.g, [0.0, 0.0, 0.0], x) == 0.0)

    def test_outside_narrow_region(self):
        """Test that points outside the narrow region are refused."""
        with pytest.raises(OutOfChartError):
            grad_u_asymptotic(self.p, self.g, [1.0, 0.0, 0.0], np.array([[0.0, 0.3]]))

    def test_blowup_matrices(self):
        """Test the entries of the blow-up matrices."""
        p3 = LameParams(lam=1.0, mu=2.0, d=3)
        B = blowup_matrix(p3, 3, [1.0, 2.0, 3.0, 0.0, 0.0, 0.0])
        assert B[0, 2] == pytest.approx(0.5)
        assert B[1, 2] == pytest.approx(1.0)
        assert B[2, 2] == pytest.approx(3.0 / 5.0)
        assert np.count_nonzero(B[:, :2]) == 0
        Brot = rotational_blowup_matrix(self.p, [0.0, 0.0, 6.0])
        assert Brot[1, 1] == pytest.approx(2.0)
        with pytest.raises(DimensionMismatchError):
            blowup_matrix(self.p, 2, [1.0, 2.0])

    def test_blowup_matrix_linear(self):
        """Test that scaling the blow-up factors scales the matrix exactly."""
        p3 = LameParams(lam=0.8, mu=1.7, d=3)
        b = np.array([0.3, -1.1, 2.5, 0.0, 0.0, 0.0])
        for s in (0.0, -2.0, 0.5, 4.0):
            np.testing.assert_array_equal(blowup_matrix(p3, 3, s * b), s * blowup_matrix(p3, 3, b))
        B = blowup_matrix(self.p, 2, [2.0, 3.0, 0.0])
        assert B[0, 1] == pytest.approx(2.0)
        assert B[1, 1] == pytest.approx(1.0)

    def test_ridge(self):
        """Test the ridge radius and endpoints on both surfaces."""
        r, seg = blowup_ridge(self.g)
        assert r == pytest.approx(0.1)
        up, low = gap_profile(self.g).surfaces(np.array([r]))
        assert seg[0, 1] == pytest.approx(low)
        assert seg[1, 1] == pytest.approx(up)


class TestModuli:
    """Tests for the effective moduli laws."""

    def test_disk_fibres(self):
        """Test mu* = mu (L2/L1) pi / sqrt(kappa eps) and E* with the Young combination."""
        p = LameParams(lam=1.0, mu=1.0)
        em = effective_moduli(p, 2, 1.5, 1.0, 1.0, 0.01)
        assert em.mu_star == pytest.approx((1 / 1.5) * math.pi / 0.1)
        assert em.e_star / em.mu_star == pytest.approx(p.young / p.mu)
        assert em.has_unknown_constant

    def test_unit_cell_values(self):
        """Test mu* = 10 pi and E* = 25 pi for unit cell, kappa = 1 and eps = 0.01."""
        em = effective_moduli(LameParams(lam=1.0, mu=1.0), 2, 1.0, 1.0, 1.0, 0.01)
        assert em.mu_star == pytest.approx(10 * math.pi)
        assert em.e_star == pytest.approx(25 * math.pi)

    def test_cell_kappa(self):
        """Test kappa = 1/(L2 - eps/2)."""
        assert cell_kappa(1.0, 0.04) == pytest.approx(1 / 0.98)


class TestAnisotropy:
    """Tests for the angular integrals."""

    @pytest.mark.parametrize("m", [2, 3, 4, 6, 8])
    def test_g_closed_form(self, m):
        """Test the quadrature of G_m against 2 Gamma(1/m)^2 / Gamma(2/m)."""
        assert g_integral(m) == pytest.approx(g_closed_form(m), rel=1e-8)

    def test_isotropic_ratio(self):
        """Test the recorded ratio m pi / G_m, which equals 1 only for m = 2."""
        assert anisotropy(2, 1.0, 1.0).isotropic_ratio == pytest.approx(1.0, rel=1e-8)
        assert anisotropy(4, 1.0, 1.0).isotropic_ratio != pytest.approx(1.0, rel=1e-3)

    def test_coefficients(self):
        """Test which replacement coefficients are set for each order."""
        assert anisotropy(3, 1.0, 2.0).coefficient_m3 is not None
        assert anisotropy(3, 1.0, 2.0).coefficient_rotation is None
        assert anisotropy(5, 1.0, 2.0).coefficient_rotation > 0
