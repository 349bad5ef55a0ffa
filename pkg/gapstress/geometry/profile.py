"""
Gap profiles of m-convex inclusion pairs.

The facing surfaces are x_d = eps/2 + h1(x') and x_d = -eps/2 + h2(x') with
h1 = g/2 and h2 = -g/2, so the vertical gap is delta = eps + g(x'). Profiles
supply g together with its first three derivatives.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..errors import OutOfChartError
from ..models import InclusionPairGeometry


def _safe_power(r: np.ndarray, p: float) -> np.ndarray:
    """r**p with the removable-singularity convention r**p = 0 at r = 0 for p < 0."""
    r = np.asarray(r, dtype=float)
    if p == 0:
        return np.ones_like(r)
    out = np.zeros_like(r)
    pos = r > 0
    out[pos] = r[pos] ** p
    return out


class Profile(ABC):
    """Surface profile g(x') over a (d-1)-dimensional chart."""

    dp: int = 1

    @abstractmethod
    def value(self, xp: np.ndarray) -> np.ndarray:
        """g at points of shape (..., dp)."""

    @abstractmethod
    def gradient(self, xp: np.ndarray) -> np.ndarray:
        """First derivatives, shape (..., dp)."""

    @abstractmethod
    def hessian(self, xp: np.ndarray) -> np.ndarray:
        """Second derivatives, shape (..., dp, dp)."""

    @abstractmethod
    def third(self, xp: np.ndarray) -> np.ndarray:
        """Third derivatives, shape (..., dp, dp, dp)."""


class FlatProfile(Profile):
    """Parallel plates, g = 0."""

    def __init__(self, dp: int = 1):
        self.dp = dp

    def value(self, xp):
        return np.zeros(np.shape(xp)[:-1])

    def gradient(self, xp):
        return np.zeros(np.shape(xp))

    def hessian(self, xp):
        return np.zeros(np.shape(xp) + (self.dp,))

    def third(self, xp):
        return np.zeros(np.shape(xp) + (self.dp, self.dp))


class PowerProfile(Profile):
    """Isotropic power profile g = kappa |x'|^m."""

    def __init__(self, kappa: float, m: int, dp: int = 1):
        self.kappa = float(kappa)
        self.m = int(m)
        self.dp = dp

    def value(self, xp):
        r = np.linalg.norm(np.asarray(xp, dtype=float), axis=-1)
        return self.kappa * r ** self.m

    def gradient(self, xp):
        xp = np.asarray(xp, dtype=float)
        r = np.linalg.norm(xp, axis=-1)
        return self.kappa * self.m * _safe_power(r, self.m - 2)[..., None] * xp

    def hessian(self, xp):
        xp = np.asarray(xp, dtype=float)
        r = np.linalg.norm(xp, axis=-1)
        k, m = self.kappa, self.m
        eye = np.eye(self.dp)
        outer = xp[..., :, None] * xp[..., None, :]
        return k * m * (
            (m - 2) * _safe_power(r, m - 4)[..., None, None] * outer
            + _safe_power(r, m - 2)[..., None, None] * eye
        )

    def third(self, xp):
        xp = np.asarray(xp, dtype=float)
        r = np.linalg.norm(xp, axis=-1)
        k, m = self.kappa, self.m
        eye = np.eye(self.dp)
        xxx = xp[..., :, None, None] * xp[..., None, :, None] * xp[..., None, None, :]
        sym = (
            eye[:, :, None] * xp[..., None, None, :]
            + eye[:, None, :] * xp[..., None, :, None]
            + eye[None, :, :] * xp[..., :, None, None]
        )
        return k * m * (
            (m - 2) * (m - 4) * _safe_power(r, m - 6)[..., None, None, None] * xxx
            + (m - 2) * _safe_power(r, m - 4)[..., None, None, None] * sym
        )


class AnisotropicPowerProfile(Profile):
    """Separable profile g = kappa |x_1|^m + kappa' |x_2|^m over a 2D chart."""

    dp = 2

    def __init__(self, kappa: float, kappa_prime: float, m: int):
        self.coefficients = np.array([kappa, kappa_prime], dtype=float)
        self.m = int(m)

    def _derivative(self, xp: np.ndarray, order: int) -> np.ndarray:
        m = self.m
        factor = 1.0
        for k in range(order):
            factor *= m - k
        a = np.abs(xp)
        # sgn(0) = 0 keeps odd derivatives regular at the axes
        sign = np.sign(xp) if order % 2 else np.ones_like(xp)
        return self.coefficients * factor * _safe_power(a, m - order) * sign

    def value(self, xp):
        return np.sum(self._derivative(np.asarray(xp, dtype=float), 0), axis=-1)

    def gradient(self, xp):
        return self._derivative(np.asarray(xp, dtype=float), 1)

    def hessian(self, xp):
        diag = self._derivative(np.asarray(xp, dtype=float), 2)
        return diag[..., :, None] * np.eye(2)

    def third(self, xp):
        diag = self._derivative(np.asarray(xp, dtype=float), 3)
        out = np.zeros(diag.shape + (2, 2))
        out[..., 0, 0, 0] = diag[..., 0]
        out[..., 1, 1, 1] = diag[..., 1]
        return out


@dataclass(frozen=True)
class GapProfile:
    """
    Gap delta(x') = eps + h1(x') - h2(x') over |x'| <= 2R.

    Attributes:
        eps: Surface distance (0 gives the touching configuration)
        profile: Surface profile g = h1 - h2
        R: Chart half-width
    """
    eps: float
    profile: Profile
    R: float

    @property
    def dp(self) -> int:
        return self.profile.dp

    def check_chart(self, xp: np.ndarray, limit: float = 2.0) -> np.ndarray:
        xp = np.asarray(xp, dtype=float)
        r = np.linalg.norm(xp, axis=-1)
        if np.any(r > limit * self.R * (1 + 1e-12)):
            raise OutOfChartError(f"|x'| exceeds {limit}R = {limit * self.R}")
        return xp

    def surface_chart(self, i: int, xp: np.ndarray) -> np.ndarray:
        """h_i(x'): +g/2 for the upper inclusion (i=1), -g/2 for the lower (i=2)."""
        if i not in (1, 2):
            raise ValueError(f"inclusion index must be 1 or 2, got {i}")
        g = self.profile.value(self.check_chart(xp))
        return 0.5 * g if i == 1 else -0.5 * g

    def surfaces(self, xp: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Heights of the upper and lower facing surfaces, eps/2 + h1 and -eps/2 + h2."""
        g = self.profile.value(self.check_chart(xp))
        return 0.5 * self.eps + 0.5 * g, -0.5 * self.eps - 0.5 * g

    def gap(self, xp: np.ndarray) -> np.ndarray:
        return self.eps + self.profile.value(self.check_chart(xp))

    def gap_gradient(self, xp: np.ndarray) -> np.ndarray:
        return self.profile.gradient(self.check_chart(xp))

    def gap_hessian(self, xp: np.ndarray) -> np.ndarray:
        return self.profile.hessian(self.check_chart(xp))

    def gap_third(self, xp: np.ndarray) -> np.ndarray:
        return self.profile.third(self.check_chart(xp))


def gap_profile(g: InclusionPairGeometry, eps: Optional[float] = None) -> GapProfile:
    """Model profile of a geometry (remainder terms set to zero)."""
    if g.kappa_prime is not None and g.d == 3:
        prof: Profile = AnisotropicPowerProfile(g.kappa, g.kappa_prime, g.m)
    else:
        prof = PowerProfile(g.kappa, g.m, dp=g.d - 1)
    return GapProfile(eps=g.eps if eps is None else eps, profile=prof, R=g.R)


def _as_chart_points(g: InclusionPairGeometry, xp) -> np.ndarray:
    xp = np.asarray(xp, dtype=float)
    if g.d == 2 and (xp.ndim == 0 or xp.shape[-1] != 1):
        xp = xp[..., None]
    return xp


def surface_chart(g: InclusionPairGeometry, i: int, xp) -> np.ndarray:
    """
    Height h_i(x') = (-1)^{i+1} (kappa/2)|x'|^m of inclusion i near contact.

    Args:
        g: Inclusion pair
        i: 1 for the upper inclusion, 2 for the lower one
        xp: Transverse coordinate(s); scalars are accepted for d = 2

    Returns:
        Heights with the leading shape of xp
    """
    return gap_profile(g).surface_chart(i, _as_chart_points(g, xp))


def gap(g: InclusionPairGeometry, xp) -> np.ndarray:
    """Vertical gap delta(x') = eps + kappa |x'|^m."""
    return gap_profile(g).gap(_as_chart_points(g, xp))
