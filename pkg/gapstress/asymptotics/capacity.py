"""
Leading terms of the capacities a_11^{alpha alpha}, the free-constant
differences C_1 - C_2 and the gradient asymptotics built from them.

With kappa2 = kappa^{2/m}/pi and kappa4 = kappa^{4/m}/pi (or their anisotropic
replacements) the capacities read:

    d=2, m=2   alpha=1,2:  pi mu / sqrt(kappa eps),  pi (lambda+2mu) / sqrt(kappa eps)
    d=2, m>=3  alpha=1,2:  mu Q_{2,m} / (kappa^{1/m} eps^{1-1/m}),  (lambda+2mu) x same
               alpha=3:    m=3: 2(lambda+2mu)/(3 kappa) |log eps|
                           m>=4: (lambda+2mu) Q~_{2,m} / (kappa^{3/m} eps^{1-3/m})
    d=3, m=2   alpha=1,2,3: mu |log eps| / kappa2 (lambda+2mu for alpha=3), plus an unknown constant
    d=3, m>=3  alpha=1,2,3: mu Q_{3,m} / (kappa2 eps^{1-2/m}) (lambda+2mu for alpha=3)
    d=3, m>=4  alpha=4:    m=4: mu |log eps| / (2 kappa4);  m>=5: mu Q~_{3,m} / (kappa4 eps^{1-4/m})
               alpha=5,6:  m=4: (lambda+2mu) |log eps| / (4 kappa4)
                           m>=5: (lambda+2mu) Q~_{3,m} / (2 kappa4 eps^{1-4/m})
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..auxiliary.fields import aux_field
from ..auxiliary.keel import ScalarKeel
from ..elasticity.rigid import rigid_count
from ..errors import DimensionMismatchError, OutOfChartError, UncoveredCaseError
from ..geometry.profile import gap_profile
from ..models import BlowUpFactorVector, CapacityAsymptote, InclusionPairGeometry, LameParams
from .anisotropy import anisotropy
from .qintegrals import q_integral
from .rates import rate_e, rate_f

logger = structlog.get_logger()

BStar = Union[BlowUpFactorVector, Sequence[float], np.ndarray]


def _check(p: LameParams, g: InclusionPairGeometry) -> None:
    if p.d != g.d:
        raise DimensionMismatchError(f"Lamé parameters are for d={p.d}, geometry for d={g.d}")


def _bstar_array(bstar: BStar, d: int) -> np.ndarray:
    b = bstar.as_array() if isinstance(bstar, BlowUpFactorVector) else np.asarray(bstar, dtype=float)
    if b.shape != (rigid_count(d),):
        raise DimensionMismatchError(f"expected {rigid_count(d)} blow-up factors, got shape {b.shape}")
    return b


def leading_alphas(d: int, m: int) -> List[int]:
    """Indices alpha whose capacity has a known leading term."""
    if d == 2:
        return [1, 2] if m == 2 else [1, 2, 3]
    if d == 3:
        return [1, 2, 3] if m <= 3 else [1, 2, 3, 4, 5, 6]
    raise UncoveredCaseError(f"no asymptotics for d={d}")


def _kappa_terms(g: InclusionPairGeometry) -> Tuple[float, Optional[float]]:
    """kappa^{2/m}/pi and kappa^{4/m}/pi, or their anisotropic replacements for d = 3."""
    m, k = g.m, g.kappa
    if g.d != 3 or g.kappa_prime is None:
        return k ** (2.0 / m) / math.pi, k ** (4.0 / m) / math.pi
    an = anisotropy(m, g.kappa, g.kappa_prime)
    if m == 2:
        return an.sqrt_kappa / math.pi, None
    if m == 3:
        return an.coefficient_m3, None
    return an.coefficient_gradient, an.coefficient_rotation


def _power_law(alpha, g, coefficient, power, law, unknown=False) -> CapacityAsymptote:
    return CapacityAsymptote(
        alpha=alpha,
        d=g.d,
        m=g.m,
        coefficient=coefficient,
        eps_power=power,
        value=coefficient * g.eps ** power,
        has_unknown_constant=unknown,
        law=law,
    )


def _log_law(alpha, g, coefficient, law, unknown=False) -> CapacityAsymptote:
    return CapacityAsymptote(
        alpha=alpha,
        d=g.d,
        m=g.m,
        coefficient=coefficient,
        logarithmic=True,
        value=coefficient * abs(math.log(g.eps)),
        has_unknown_constant=unknown,
        law=law,
    )


def a11_leading(p: LameParams, g: InclusionPairGeometry, alpha: int) -> CapacityAsymptote:
    """
    Leading term of a_11^{alpha alpha}.

    Args:
        p: Lamé parameters
        g: Inclusion pair
        alpha: 1-based rigid motion index

    Returns:
        CapacityAsymptote; the O(1) remainder is flagged, never set to zero
    """
    _check(p, g)
    d, m, k = g.d, g.m, g.kappa
    if alpha not in leading_alphas(d, m):
        raise UncoveredCaseError(f"no leading law for a_11^{{{alpha}{alpha}}} with d={d}, m={m}")
    mod = p.mu if alpha in (1, 4) or (alpha == 2 and d == 3) else p.lam2mu

    if d == 2:
        if m == 2:
            return _power_law(alpha, g, math.pi * mod / math.sqrt(k), -0.5, "pi*c/sqrt(kappa*eps)", True)
        if alpha < 3:
            return _power_law(
                alpha, g, mod * q_integral(2, m) / k ** (1.0 / m), -(1 - 1.0 / m),
                "c*Q_{2,m}/(kappa^{1/m} eps^{1-1/m})", True,
            )
        if m == 3:
            return _log_law(alpha, g, 2 * p.lam2mu / (3 * k), "2(lambda+2mu)/(3 kappa)|log eps|", True)
        return _power_law(
            alpha, g, p.lam2mu * q_integral(2, m, tilde=True) / k ** (3.0 / m), -(1 - 3.0 / m),
            "(lambda+2mu) Q~_{2,m}/(kappa^{3/m} eps^{1-3/m})", True,
        )

    kappa2, kappa4 = _kappa_terms(g)
    if m == 2:
        return _log_law(alpha, g, mod / kappa2, "pi*c/kappa |log eps| + C", True)
    if alpha <= 3:
        return _power_law(
            alpha, g, mod * q_integral(3, m) / kappa2, -(1 - 2.0 / m),
            "pi*c*Q_{3,m}/(kappa^{2/m} eps^{1-2/m})", True,
        )
    if m == 4:
        factor = 2.0 if alpha == 4 else 4.0
        return _log_law(alpha, g, mod / (factor * kappa4), f"pi*c/({factor:g} kappa)|log eps|", True)
    factor = 1.0 if alpha == 4 else 2.0
    return _power_law(
        alpha, g, mod * q_integral(3, m, tilde=True) / (factor * kappa4), -(1 - 4.0 / m),
        f"pi*c*Q~_{{3,m}}/({factor:g} kappa^{{4/m}} eps^{{1-4/m}})", True,
    )


def capacity_leading(p: LameParams, g: InclusionPairGeometry) -> np.ndarray:
    """Vector of leading a_11^{alpha alpha} values, 0 where no law applies."""
    out = np.zeros(rigid_count(g.d))
    for alpha in leading_alphas(g.d, g.m):
        out[alpha - 1] = a11_leading(p, g, alpha).value
    return out


def c_diff_leading(p: LameParams, g: InclusionPairGeometry, bstar: BStar) -> np.ndarray:
    """
    Leading C_1^alpha - C_2^alpha = b_1^{*alpha} / a_11^{alpha alpha}.

    Args:
        p: Lamé parameters
        g: Inclusion pair
        bstar: Blow-up factors b_1^{*beta}[phi]

    Returns:
        Array of length d(d+1)/2 with zeros at the non-leading alpha
    """
    _check(p, g)
    b = _bstar_array(bstar, g.d)
    out = np.zeros_like(b)
    for alpha in leading_alphas(g.d, g.m):
        out[alpha - 1] = b[alpha - 1] / a11_leading(p, g, alpha).value
    return out


def composed_gradient_coefficients(p: LameParams, g: InclusionPairGeometry) -> np.ndarray:
    """1 / a_11^{alpha alpha} at the leading alpha, 0 elsewhere."""
    return c_diff_leading(p, g, np.ones(rigid_count(g.d)))


def displayed_gradient_coefficients(p: LameParams, g: InclusionPairGeometry) -> np.ndarray:
    """
    Coefficients multiplying b_1^{*alpha} grad u_1^alpha in the gradient formulas.

    Built from the rate functions directly. They equal the composed
    coefficients 1/a_11^{alpha alpha} except for d = 3, m >= 4 and alpha = 5, 6,
    where the displayed value is half the composed one.
    """
    _check(p, g)
    d, m, k, eps = g.d, g.m, g.kappa, g.eps
    mu, lam2mu = p.mu, p.lam2mu
    out = np.zeros(rigid_count(d))
    if d == 2:
        if m == 2:
            base = math.sqrt(k) * math.sqrt(eps) / math.pi
        else:
            base = k ** (1.0 / m) * eps ** (1 - 1.0 / m) / q_integral(2, m)
            out[2] = rate_e(k, eps, m) / lam2mu
        out[0], out[1] = base / mu, base / lam2mu
        return out

    kappa2, kappa4 = _kappa_terms(g)
    log_eps = abs(math.log(eps))
    if m == 2:
        base = kappa2 / log_eps
    else:
        base = kappa2 * eps ** (1 - 2.0 / m) / q_integral(3, m)
    out[0], out[1], out[2] = base / mu, base / mu, base / lam2mu
    if m >= 4:
        if g.kappa_prime is None:
            f = rate_f(k, eps, m)
        else:
            # F with kappa^{4/m}/pi replaced
            f = kappa4 * (2.0 / log_eps if m == 4 else eps ** (1 - 4.0 / m) / q_integral(3, m, tilde=True))
        out[3] = f / mu
        out[4] = out[5] = f / lam2mu
    return out


def displayed_ratio(d: int, m: int) -> np.ndarray:
    """Composed over displayed coefficient per alpha."""
    r = np.ones(rigid_count(d))
    if d == 3 and m >= 4:
        r[4:] = 2.0
    return r


def grad_u_asymptotic(p: LameParams, g: InclusionPairGeometry, bstar: BStar, x) -> np.ndarray:
    """
    Leading gradient sum_alpha (C_1^alpha - C_2^alpha) grad u_1^alpha(x).

    Only the singular part of grad u_1^alpha enters; its bounded terms belong
    to the O(1) remainder. At x' = 0 the result has the B_d structure, with
    entries in the last column only.

    Args:
        p: Lamé parameters
        g: Inclusion pair
        bstar: Blow-up factors
        x: Points of shape (..., d) in Omega_R

    Returns:
        Gradient matrices of shape (..., d, d)
    """
    x = np.asarray(x, dtype=float)
    c = c_diff_leading(p, g, bstar)
    ScalarKeel.from_geometry(g).check_region(x, limit=1.0)
    out = np.zeros(x.shape[:-1] + (g.d, g.d))
    for alpha in leading_alphas(g.d, g.m):
        if c[alpha - 1] == 0:
            continue
        out += c[alpha - 1] * aux_field(g, p, alpha).leading_gradient(x)
    return out


def blowup_matrix(p: LameParams, d: int, bstar: BStar) -> np.ndarray:
    """
    Blow-up matrix B_d[phi]; only its last column is nonzero.

    d = 2: b1/mu E_12 + b2/(lambda+2mu) E_22
    d = 3: (b1 E_13 + b2 E_23)/mu + b3/(lambda+2mu) E_33
    """
    b = _bstar_array(bstar, d)
    B = np.zeros((d, d))
    for i in range(d - 1):
        B[i, d - 1] = b[i] / p.mu
    B[d - 1, d - 1] = b[d - 1] / p.lam2mu
    return B


def rotational_blowup_matrix(p: LameParams, bstar: BStar) -> np.ndarray:
    """Second 2D blow-up matrix b3/(lambda+2mu) E_22, multiplying x_1/delta."""
    b = _bstar_array(bstar, 2)
    B = np.zeros((2, 2))
    B[1, 1] = b[2] / p.lam2mu
    return B


def near_origin_gradient(p: LameParams, g: InclusionPairGeometry, bstar: BStar, x) -> np.ndarray:
    """
    Simplified gradient near x' = 0: (mu / a_11^{11}) B_d / delta(x'), plus
    ((lambda+2mu) / a_11^{33}) B_rot x_1 / delta(x_1) for d = 2, m >= 3.
    """
    _check(p, g)
    x = np.asarray(x, dtype=float)
    prof = gap_profile(g)
    xp = x[..., :-1]
    delta = prof.gap(xp)
    lead = p.mu / a11_leading(p, g, 1).value
    out = lead * blowup_matrix(p, g.d, bstar) / delta[..., None, None]
    if g.d == 2 and g.m >= 3:
        rot = p.lam2mu / a11_leading(p, g, 3).value
        out = out + rot * rotational_blowup_matrix(p, bstar) * (xp[..., 0] / delta)[..., None, None]
    return out


def blowup_ridge(g: InclusionPairGeometry) -> Tuple[float, np.ndarray]:
    """
    Radius eps^{1/m} and the vertical segment over x' = (eps^{1/m}, 0, ...).

    Returns:
        (radius, array of shape (2, d) with the lower and upper endpoints)
    """
    r = g.eps ** (1.0 / g.m)
    if r > g.R:
        raise OutOfChartError(f"ridge radius {r:.4g} exceeds the chart half-width {g.R}")
    xp = np.zeros(g.d - 1)
    xp[0] = r
    up, low = gap_profile(g).surfaces(xp)
    return r, np.array([np.append(xp, low), np.append(xp, up)])
