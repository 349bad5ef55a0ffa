"""
Corrected vector auxiliary fields u_1^alpha = u_bar psi_alpha + corrector.

The corrector cancels the delta^-2 terms that the Lamé operator produces from
u_bar psi_alpha:

    alpha <  d:  c1 f(u_bar) d_alpha delta e_d,             c1 = (lambda+mu)/(lambda+2mu)
    alpha == d:  c2 f(u_bar) sum_{a<d} d_a delta e_a,       c2 = (lambda+mu)/mu
    alpha >  d:  no corrector

f(u_bar) vanishes on both surfaces, so u_1^alpha = psi_alpha on the upper
surface and 0 on the lower one.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import structlog
from scipy import integrate

from ..elasticity.energy import apply_lame
from ..elasticity.rigid import RigidMotion, rigid_count
from ..errors import DimensionMismatchError
from ..models import InclusionPairGeometry, LameParams
from .keel import GapDerivatives, KeelEvaluation, ScalarKeel, bridge

logger = structlog.get_logger()


@dataclass(frozen=True)
class FieldDerivatives:
    """Values (..., d), gradients (..., d, d) and Hessians H[..., i, j, k] = d_j d_k u^i."""
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray


@dataclass(frozen=True)
class VectorAuxField:
    """
    Auxiliary field attached to one inclusion and one rigid motion.

    Attributes:
        alpha: 1-based rigid motion index
        keel: Scalar keel (mirror=True gives the lower-inclusion family)
        params: Lamé parameters entering the corrector coefficients
    """
    alpha: int
    keel: ScalarKeel
    params: LameParams
    psi: RigidMotion = field(init=False)

    def __post_init__(self):
        d = self.keel.d
        if self.params.d != d:
            raise DimensionMismatchError(f"Lamé parameters are for d={self.params.d}, keel for d={d}")
        if not 1 <= self.alpha <= rigid_count(d):
            raise ValueError(f"alpha must lie in 1..{rigid_count(d)}, got {self.alpha}")
        object.__setattr__(self, "psi", RigidMotion(alpha=self.alpha, d=d))

    @property
    def d(self) -> int:
        return self.keel.d

    @property
    def has_corrector(self) -> bool:
        return self.alpha <= self.d

    @property
    def corrector_coefficient(self) -> float:
        p = self.params
        if self.alpha < self.d:
            return (p.lam + p.mu) / p.lam2mu
        if self.alpha == self.d:
            return (p.lam + p.mu) / p.mu
        return 0.0

    def _prepare(self, x: np.ndarray) -> Tuple[np.ndarray, GapDerivatives, KeelEvaluation]:
        x = np.asarray(x, dtype=float)
        self.keel.check_region(x)
        gd = self.keel.gap_derivatives(x[..., :-1])
        return x, gd, self.keel.evaluate(x, gd)

    def keel_part(self, x: np.ndarray) -> FieldDerivatives:
        """u_bar psi_alpha with its derivatives."""
        x, _, ev = self._prepare(x)
        return self._keel_part(x, ev)

    def corrector_part(self, x: np.ndarray) -> FieldDerivatives:
        x, gd, ev = self._prepare(x)
        return self._corrector_part(gd, ev)

    def _keel_part(self, x: np.ndarray, ev: KeelEvaluation) -> FieldDerivatives:
        psi = self.psi(x)
        G = self.psi.gradient
        value = ev.value[..., None] * psi
        grad = psi[..., :, None] * ev.gradient[..., None, :] + ev.value[..., None, None] * G
        hess = (
            psi[..., :, None, None] * ev.hessian[..., None, :, :]
            + G[:, None, :] * ev.gradient[..., None, :, None]
            + G[:, :, None] * ev.gradient[..., None, None, :]
        )
        return FieldDerivatives(value=value, gradient=grad, hessian=hess)

    def _corrector_part(self, gd: GapDerivatives, ev: KeelEvaluation) -> FieldDerivatives:
        d = self.d
        shape = ev.value.shape
        value = np.zeros(shape + (d,))
        grad = np.zeros(shape + (d, d))
        hess = np.zeros(shape + (d, d, d))
        if not self.has_corrector:
            return FieldDerivatives(value=value, gradient=grad, hessian=hess)

        # the lower family uses 1 - u_bar; f is symmetric about 1/2, so the sign is carried by c
        c = self.corrector_coefficient * (-1.0 if self.keel.mirror else 1.0)
        f, fp = bridge(ev.value)
        u1, u2 = ev.gradient, ev.hessian

        if self.alpha < d:
            terms = [(d - 1, self.alpha - 1)]
        else:
            terms = [(a, a) for a in range(d - 1)]

        for comp, a in terms:
            w = gd.d1[..., a]
            w1 = gd.d2[..., a, :]
            w2 = gd.d3[..., a, :, :]
            value[..., comp] += c * f * w
            grad[..., comp, :] += c * (fp[..., None] * u1 * w[..., None] + f[..., None] * w1)
            hess[..., comp, :, :] += c * (
                u1[..., :, None] * u1[..., None, :] * w[..., None, None]
                + fp[..., None, None] * u2 * w[..., None, None]
                + fp[..., None, None] * (u1[..., :, None] * w1[..., None, :] + w1[..., :, None] * u1[..., None, :])
                + f[..., None, None] * w2
            )
        return FieldDerivatives(value=value, gradient=grad, hessian=hess)

    def leading_gradient(self, x: np.ndarray) -> np.ndarray:
        """
        Singular part of the gradient: psi_alpha (x) grad u_bar plus c f'(u_bar) grad u_bar d_a delta.

        Drops the bounded terms u_bar grad psi_alpha and c f(u_bar) grad d_a delta.
        At x' = 0 only the last column is nonzero.
        """
        x, gd, ev = self._prepare(x)
        grad = self.psi(x)[..., :, None] * ev.gradient[..., None, :]
        if self.has_corrector:
            c = self.corrector_coefficient * (-1.0 if self.keel.mirror else 1.0)
            _, fp = bridge(ev.value)
            d = self.d
            terms = [(d - 1, self.alpha - 1)] if self.alpha < d else [(a, a) for a in range(d - 1)]
            for comp, a in terms:
                grad[..., comp, :] += c * (fp * gd.d1[..., a])[..., None] * ev.gradient
        return grad

    def derivatives(self, x: np.ndarray) -> FieldDerivatives:
        x, gd, ev = self._prepare(x)
        k = self._keel_part(x, ev)
        c = self._corrector_part(gd, ev)
        return FieldDerivatives(
            value=k.value + c.value,
            gradient=k.gradient + c.gradient,
            hessian=k.hessian + c.hessian,
        )


def aux_field(
    g: InclusionPairGeometry,
    p: LameParams,
    alpha: int,
    mirror: bool = False,
    touching: bool = False,
) -> VectorAuxField:
    """Auxiliary field u_1^alpha (or u_2^alpha with mirror=True) of a geometry."""
    return VectorAuxField(alpha=alpha, keel=ScalarKeel.from_geometry(g, touching=touching, mirror=mirror), params=p)


def aux_eval(a: VectorAuxField, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Value and gradient of an auxiliary field.

    Args:
        a: Auxiliary field
        x: Points of shape (..., d) in the narrow region over |x'| <= 2R

    Returns:
        (value (..., d), gradient (..., d, d)) from exact chain-rule derivatives
    """
    der = a.derivatives(x)
    return der.value, der.gradient


def aux_hessian(a: VectorAuxField, x) -> np.ndarray:
    """Second derivatives H[..., i, j, k] = d_j d_k (u_1^alpha)^i."""
    return a.derivatives(x).hessian


def lame_residual(a: VectorAuxField, p: Optional[LameParams], x) -> np.ndarray:
    """
    Lamé operator applied to the auxiliary field.

    Args:
        a: Auxiliary field (its own parameters fix the corrector)
        p: Parameters of the operator; a.params when None
        x: Points in the narrow region over |x'| <= R

    Returns:
        Residual vectors of shape (..., d)
    """
    p = a.params if p is None else p
    x = np.asarray(x, dtype=float)
    a.keel.check_region(x, limit=1.0)
    return apply_lame(p, a.derivatives(x).hessian)


def cancellation_terms(a: VectorAuxField, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    The two delta^-2 terms that cancel for alpha = 1.

    Returns (lambda+mu) d_1 d_d (u_bar psi_1)^1 and (lambda+2mu) d_d d_d (corrector)^d.
    """
    if a.alpha != 1:
        raise ValueError("cancellation terms are defined for alpha = 1")
    p, d = a.params, a.d
    keel = a.keel_part(x).hessian
    corr = a.corrector_part(x).hessian
    return (p.lam + p.mu) * keel[..., 0, 0, d - 1], p.lam2mu * corr[..., d - 1, d - 1, d - 1]


def corrector_energy(a: VectorAuxField, R: Optional[float] = None, n_gauss: int = 12, n_theta: int = 32) -> float:
    """
    Dirichlet energy of the corrector over the narrow region |x'| <= R.

    The through-gap direction uses Gauss-Legendre nodes in the fraction
    s = (x_d - lower)/delta; x' uses adaptive quadrature (radially for d = 3).
    """
    if not a.has_corrector:
        return 0.0
    prof = a.keel.profile
    R = prof.R if R is None else R
    s, w = np.polynomial.legendre.leggauss(n_gauss)
    s, w = 0.5 * (s + 1), 0.5 * w

    def column(xp: np.ndarray) -> np.ndarray:
        """Integral over the gap above each chart point, shape xp.shape[:-1]."""
        up, low = prof.surfaces(xp)
        delta = up - low
        xd = low[..., None] + s * delta[..., None]
        pts = np.concatenate([np.broadcast_to(xp[..., None, :], xd.shape + (xp.shape[-1],)), xd[..., None]], axis=-1)
        grad = a.corrector_part(pts).gradient
        dens = np.sum(grad ** 2, axis=(-2, -1))
        return delta * np.sum(w * dens, axis=-1)

    if a.d == 2:
        def integrand(t: float) -> float:
            return float(column(np.array([[t]]))[0])

        # the corrector gradient peaks near the ridge |x'| ~ eps^(1/m)
        m = getattr(prof.profile, "m", None)
        ridge = prof.eps ** (1.0 / m) if m and prof.eps > 0 else None
        points = [ridge] if ridge is not None and ridge < R else None
        val, _ = integrate.quad(integrand, 0.0, R, points=points, limit=200, epsrel=1e-9)
        total = 2.0 * val
    else:
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)

        def integrand(r: float) -> float:
            return float(r * np.mean(column(r * dirs)) * 2 * np.pi)

        total, _ = integrate.quad(integrand, 0.0, R, limit=200, epsrel=1e-9)
    logger.debug("Corrector energy", alpha=a.alpha, eps=prof.eps, value=total)
    return float(total)


def aux_family(g: InclusionPairGeometry, p: LameParams, mirror: bool = False) -> List[VectorAuxField]:
    return [aux_field(g, p, alpha, mirror=mirror) for alpha in range(1, rigid_count(g.d) + 1)]
