"""
Rate functions rho_d, rho_{m,d}, E(kappa, eps, m) and F(kappa, eps, m).

Table entries equal to zero are exact zeros.
"""

import math
from typing import Optional

from ..errors import UnsupportedDimensionError
from ..models import RateFunctions
from .qintegrals import q_integral


def _check_eps(eps: float) -> float:
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    return abs(math.log(eps))


def rho_d(d: int, eps: float) -> float:
    """sqrt(eps) for d = 2, 1/|log eps| for d = 3."""
    log_eps = _check_eps(eps)
    if d == 2:
        return math.sqrt(eps)
    if d == 3:
        return 1.0 / log_eps
    raise UnsupportedDimensionError(f"unsupported dimension d={d}")


def rho_md(d: int, m: int, eps: float) -> Optional[float]:
    """Relative error rate for m >= d+1; None below that order."""
    log_eps = _check_eps(eps)
    if d == 2:
        if m < 3:
            return None
        if m == 3:
            return 1.0 / log_eps
        if m == 4:
            return eps ** 0.25
        return 0.0
    if d == 3:
        if m < 4:
            return None
        if m == 4:
            return 1.0 / log_eps
        if m <= 7:
            return eps ** (1.0 - 4.0 / m)
        return 0.0
    raise UnsupportedDimensionError(f"unsupported dimension d={d}")


def rate_e(kappa: float, eps: float, m: int) -> float:
    """E(kappa, eps, m), the rotational coefficient for d = 2, m >= 3."""
    log_eps = _check_eps(eps)
    if m < 3:
        raise ValueError("E(kappa, eps, m) is defined for m >= 3")
    if m == 3:
        return 1.5 * kappa / log_eps
    return kappa ** (3.0 / m) * eps ** (1.0 - 3.0 / m) / q_integral(2, m, tilde=True)


def rate_f(kappa: float, eps: float, m: int) -> float:
    """F(kappa, eps, m), the rotational coefficient for d = 3, m >= 4."""
    log_eps = _check_eps(eps)
    if m < 4:
        raise ValueError("F(kappa, eps, m) is defined for m >= 4")
    if m == 4:
        return 2 * kappa / (math.pi * log_eps)
    return kappa ** (4.0 / m) * eps ** (1.0 - 4.0 / m) / (math.pi * q_integral(3, m, tilde=True))


def rate(d: int, m: int, eps: float, kappa: float = 1.0) -> RateFunctions:
    """
    All rate functions at one eps.

    Args:
        d: Dimension
        m: Convexity order
        eps: Distance, 0 < eps < 1/2
        kappa: Relative convexity

    Returns:
        RateFunctions with entries that are undefined for (d, m) left as None
    """
    return RateFunctions(
        d=d,
        m=m,
        eps=eps,
        kappa=kappa,
        rho_d=rho_d(d, eps),
        rho_md=rho_md(d, m, eps),
        e_rate=rate_e(kappa, eps, m) if d == 2 and m >= 3 else None,
        f_rate=rate_f(kappa, eps, m) if d == 3 and m >= 4 else None,
    )
