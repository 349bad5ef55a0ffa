"""
Scalar keel u_bar and the bridge function f.

u_bar(x) = (x_d + eps/2 - h2(x')) / delta(x') rises linearly from 0 on the
lower surface to 1 on the upper one. Derivatives are exact chain-rule
expressions in the derivatives of delta; nothing is differentiated numerically.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import DimensionMismatchError, OutOfChartError
from ..geometry.profile import GapProfile, gap_profile
from ..models import InclusionPairGeometry


def bridge(t) -> Tuple[np.ndarray, np.ndarray]:
    """
    f(t) = (t - 1/2)^2 / 2 - 1/8 and f'(t) = t - 1/2.

    f vanishes at t = 0 and t = 1 and has its minimum -1/8 at t = 1/2; f'' = 1.
    """
    t = np.asarray(t, dtype=float)
    return 0.5 * (t - 0.5) ** 2 - 0.125, t - 0.5


@dataclass(frozen=True)
class GapDerivatives:
    """delta and its derivatives lifted to R^d (zero in the x_d direction)."""
    delta: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


@dataclass(frozen=True)
class KeelEvaluation:
    value: np.ndarray
    gradient: np.ndarray
    hessian: np.ndarray


@dataclass(frozen=True)
class ScalarKeel:
    """
    Keel over the chart |x'| <= 2R.

    Attributes:
        profile: Gap profile (eps = 0 gives the touching keel)
        d: Spatial dimension
        mirror: Use 1 - u_bar (family attached to the lower inclusion)
    """
    profile: GapProfile
    d: int
    mirror: bool = False

    @classmethod
    def from_geometry(
        cls, g: InclusionPairGeometry, touching: bool = False, mirror: bool = False
    ) -> "ScalarKeel":
        return cls(profile=gap_profile(g, eps=0.0 if touching else None), d=g.d, mirror=mirror)

    def _split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DimensionMismatchError(f"points have {x.shape[-1]} coordinates, expected {self.d}")
        return x[..., :-1], x[..., -1]

    def gap_derivatives(self, xp: np.ndarray) -> GapDerivatives:
        d = self.d
        shape = xp.shape[:-1]
        d1 = np.zeros(shape + (d,))
        d2 = np.zeros(shape + (d, d))
        d3 = np.zeros(shape + (d, d, d))
        d1[..., :-1] = self.profile.gap_gradient(xp)
        d2[..., :-1, :-1] = self.profile.gap_hessian(xp)
        d3[..., :-1, :-1, :-1] = self.profile.gap_third(xp)
        return GapDerivatives(delta=self.profile.gap(xp), d1=d1, d2=d2, d3=d3)

    def check_region(self, x: np.ndarray, limit: float = 2.0) -> None:
        """Raise OutOfChartError unless every point lies in the closed narrow region."""
        xp, xd = self._split(x)
        self.profile.check_chart(xp, limit=limit)
        up, low = self.profile.surfaces(xp)
        tol = 1e-12 * np.maximum(1.0, up - low)
        if np.any(xd > up + tol) or np.any(xd < low - tol):
            raise OutOfChartError("point lies outside the narrow region between the inclusions")

    def evaluate(self, x: np.ndarray, gd: Optional[GapDerivatives] = None) -> KeelEvaluation:
        """Value, gradient (..., d) and Hessian (..., d, d) at points of shape (..., d)."""
        xp, xd = self._split(x)
        if gd is None:
            self.check_region(x)
            gd = self.gap_derivatives(xp)
        delta = gd.delta
        if np.any(delta <= 0):
            raise OutOfChartError("keel is singular where the gap closes")

        # numerator N = x_d + eps/2 + g/2 with g = delta - eps
        eps = self.profile.eps
        num = xd + 0.5 * eps + 0.5 * (delta - eps)
        n1 = 0.5 * gd.d1
        n1[..., -1] = 1.0
        n2 = 0.5 * gd.d2

        u = num / delta
        inv = 1.0 / delta
        du = (n1 - u[..., None] * gd.d1) * inv[..., None]
        ddu = (
            n2
            - du[..., :, None] * gd.d1[..., None, :]
            - gd.d1[..., :, None] * du[..., None, :]
            - u[..., None, None] * gd.d2
        ) * inv[..., None, None]

        if self.mirror:
            return KeelEvaluation(value=1.0 - u, gradient=-du, hessian=-ddu)
        return KeelEvaluation(value=u, gradient=du, hessian=ddu)


def keel_eval(k: ScalarKeel, x) -> Tuple[np.ndarray, np.ndarray]:
    """
    Keel value and gradient.

    Args:
        k: Scalar keel
        x: Points of shape (..., d) inside the narrow region over |x'| <= 2R

    Returns:
        (value, gradient); the x_d component of the gradient is 1/delta(x')
    """
    ev = k.evaluate(np.asarray(x, dtype=float))
    return ev.value, ev.gradient
