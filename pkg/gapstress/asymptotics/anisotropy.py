"""
Angular integrals for 3D inclusions with two principal convexity coefficients.

Surfaces x_3 = +-(eps/2 + kappa/2 |x_1|^m + kappa'/2 |x_2|^m) replace the
isotropic kappa^{2/m}/pi and kappa^{4/m}/pi factors of the gradient formulas by
ratios of the integrals G_m and G~_m below.
"""

import math
from functools import lru_cache

import numpy as np
import structlog
from scipy import integrate, special

from ..config import settings
from ..errors import GeometryError
from ..models import AnisotropyIntegrals

logger = structlog.get_logger()


def e_m(theta, m: int) -> np.ndarray:
    """E_m(theta) with |sin| and |cos|, so the integrand is 2 pi periodic."""
    s, c = np.abs(np.sin(theta)), np.abs(np.cos(theta))
    a, b = 2.0 / m - 1, 2.0 / m + 1
    with np.errstate(divide="ignore"):
        return s ** a * c ** b + c ** a * s ** b


def f_m(theta, m: int, kappa: float, kappa_prime: float) -> np.ndarray:
    return (np.cos(theta) ** 2 / kappa) ** (2.0 / m) + (np.sin(theta) ** 2 / kappa_prime) ** (2.0 / m)


def g_closed_form(m: int) -> float:
    """G_m = 2 Gamma(1/m)^2 / Gamma(2/m)."""
    return 2 * special.gamma(1.0 / m) ** 2 / special.gamma(2.0 / m)


def _quarter_integral(m: int, weight_fn) -> float:
    """
    int_0^{pi/2} sin^a cos^b w(theta) dtheta with a = 2/m - 1, b = 2/m + 1.

    The endpoint singularity theta^a is handed to QUADPACK's algebraic weight.
    """
    a, b = 2.0 / m - 1, 2.0 / m + 1
    tol = max(settings.quad_tol, 1e-12)

    def smooth(theta: float) -> float:
        return np.sinc(theta / np.pi) ** a * math.cos(theta) ** b * weight_fn(theta)

    val, _ = integrate.quad(smooth, 0.0, math.pi / 2, weight="alg", wvar=(a, 0.0), epsabs=tol, epsrel=tol, limit=200)
    return val


@lru_cache(maxsize=128)
def g_integral(m: int) -> float:
    """G_m = int_0^{2 pi} E_m; both terms of E_m integrate to the same value."""
    return 8.0 * _quarter_integral(m, lambda t: 1.0)


@lru_cache(maxsize=512)
def g_tilde_integral(m: int, kappa: float, kappa_prime: float) -> float:
    """G~_m = int_0^{2 pi} E_m F_m; the second term of E_m is folded by theta -> pi/2 - theta."""
    return 4.0 * _quarter_integral(
        m,
        lambda t: f_m(t, m, kappa, kappa_prime) + f_m(math.pi / 2 - t, m, kappa, kappa_prime),
    )


def anisotropy(m: int, kappa: float, kappa_prime: float) -> AnisotropyIntegrals:
    """
    Angular integrals and replacement coefficients.

    Args:
        m: Convexity order (>= 2)
        kappa: Coefficient of |x_1|^m
        kappa_prime: Coefficient of |x_2|^m

    Returns:
        AnisotropyIntegrals; coefficient_gradient replaces kappa^{2/m}/pi,
        coefficient_rotation replaces kappa^{4/m}/pi (m >= 4) and coefficient_m3
        replaces kappa^{2/3}/pi (m = 3)
    """
    if kappa <= 0 or kappa_prime <= 0:
        raise GeometryError("kappa and kappa_prime must be positive")
    if m < 2:
        raise GeometryError(f"convexity order must be >= 2, got {m}")
    g = g_integral(m)
    gt = g_tilde_integral(m, float(kappa), float(kappa_prime))
    kk = kappa * kappa_prime
    closed = g_closed_form(m)
    ratio = m * math.pi / g
    if abs(ratio - 1) > 1e-9:
        logger.debug("Anisotropic coefficient differs from isotropic at kappa = kappa'", m=m, ratio=ratio)
    return AnisotropyIntegrals(
        m=m,
        kappa=kappa,
        kappa_prime=kappa_prime,
        g_m=g,
        g_tilde=gt,
        g_closed=closed,
        sqrt_kappa=math.sqrt(kk),
        coefficient_m3=3 * kk ** (1.0 / 3) / (2 * g) if m == 3 else None,
        coefficient_gradient=m * kk ** (1.0 / m) / g,
        coefficient_rotation=m * kk ** (2.0 / m) / gt if m >= 4 else None,
        isotropic_ratio=ratio,
    )
