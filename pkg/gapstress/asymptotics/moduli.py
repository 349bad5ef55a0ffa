"""
Effective moduli of a periodic array of nearly touching stiff fibres.

    mu*_m = mu (L2/L1) Q_{2,m} / (kappa^{1/m} eps^{1-1/m})
    E*_m  = E  (L2/L1) Q_{2,m} / (kappa^{1/m} eps^{1-1/m}),  E = mu(3 lambda + 2 mu)/(lambda + mu)

Both are leading order; the additive O(1) term is flagged as unknown.
"""

import structlog

from ..errors import GeometryError
from ..models import EffectiveModuli, LameParams
from .qintegrals import q_integral

logger = structlog.get_logger()


def _scale(m: int, L1: float, L2: float, kappa: float, eps: float) -> float:
    if m < 2:
        raise GeometryError(f"convexity order must be >= 2, got {m}")
    if L1 <= 0 or L2 <= 0:
        raise GeometryError("cell half-lengths must be positive")
    if kappa <= 0 or eps <= 0:
        raise GeometryError("kappa and eps must be positive")
    return (L2 / L1) * q_integral(2, m) / (kappa ** (1.0 / m) * eps ** (1 - 1.0 / m))


def effective_moduli(p: LameParams, m: int, L1: float, L2: float, kappa: float, eps: float) -> EffectiveModuli:
    """
    Leading effective shear and extensional moduli.

    Args:
        p: Lamé parameters of the matrix
        m: Convexity order of the fibre cross-sections
        L1: Horizontal cell half-length
        L2: Vertical cell half-length
        kappa: Relative convexity of neighbouring fibres
        eps: Distance between neighbouring fibres

    Returns:
        EffectiveModuli with source "asymptotic"
    """
    s = _scale(m, L1, L2, kappa, eps)
    return EffectiveModuli(
        m=m,
        eps=eps,
        L1=L1,
        L2=L2,
        kappa=kappa,
        mu_star=p.mu * s,
        e_star=p.young * s,
        young=p.young,
    )


def cell_kappa(L2: float, eps: float) -> float:
    """Relative convexity of the disk fibres of the period cell, radius L2 - eps/2."""
    return 1.0 / (L2 - eps / 2)
