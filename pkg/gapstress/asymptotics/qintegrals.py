"""
Profile integrals Q_{d,m} = 2 int_0^inf t^(d-2)/(1+t^m) dt and
Q~_{d,m} = 2 int_0^inf t^d/(1+t^m) dt.
"""

import math
from functools import lru_cache
from typing import Optional

import structlog
from scipy import integrate

from ..config import settings
from ..errors import DivergentIntegralError, UnsupportedDimensionError
from ..models import QIntegrals

logger = structlog.get_logger()


def _exponent(d: int, tilde: bool) -> int:
    """s in t^(s-1)/(1+t^m): d-1 for Q, d+1 for Q~."""
    if d not in (2, 3):
        raise UnsupportedDimensionError(f"unsupported dimension d={d}")
    return d + 1 if tilde else d - 1


def q_converges(d: int, m: int, tilde: bool = False) -> bool:
    return m > _exponent(d, tilde)


def q_closed_form(d: int, m: int, tilde: bool = False) -> float:
    """Beta-function value 2 pi / (m sin(s pi / m))."""
    s = _exponent(d, tilde)
    if m <= s:
        raise DivergentIntegralError(f"{'Q~' if tilde else 'Q'}_{{{d},{m}}} diverges (need m > {s})")
    return 2 * math.pi / (m * math.sin(s * math.pi / m))


@lru_cache(maxsize=256)
def q_integral(d: int, m: int, tilde: bool = False) -> float:
    """
    Q_{d,m} (or Q~_{d,m}) by adaptive quadrature.

    The range is split at 1 and the tail is mapped by t = 1/u, so both pieces
    are proper integrals over [0, 1].

    Args:
        d: Dimension, 2 or 3
        m: Convexity order
        tilde: Evaluate Q~ instead of Q

    Returns:
        The integral value
    """
    s = _exponent(d, tilde)
    if m <= s:
        raise DivergentIntegralError(f"{'Q~' if tilde else 'Q'}_{{{d},{m}}} diverges (need m > {s})")
    tol = settings.quad_tol
    head, err_head = integrate.quad(
        lambda t: t ** (s - 1) / (1 + t ** m), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200
    )
    tail, err_tail = integrate.quad(
        lambda u: u ** (m - s - 1) / (u ** m + 1), 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200
    )
    logger.debug("Q integral", d=d, m=m, tilde=tilde, error=err_head + err_tail)
    return 2.0 * (head + tail)


def q_table(d: int, m: int) -> QIntegrals:
    """Both integrals with their closed forms; divergent entries are None."""

    def maybe(fn, tilde: bool) -> Optional[float]:
        return fn(d, m, tilde) if q_converges(d, m, tilde) else None

    return QIntegrals(
        d=d,
        m=m,
        q=maybe(q_integral, False),
        q_tilde=maybe(q_integral, True),
        q_closed=maybe(q_closed_form, False),
        q_tilde_closed=maybe(q_closed_form, True),
    )
