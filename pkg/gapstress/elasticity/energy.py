"""
Quadratic energy forms of the isotropic Lamé tensor.

Gradient arrays follow the convention g[..., i, j] = d u^i / d x_j. The
fourth-order tensor is never formed; the expanded scalar identities are coded
directly for d = 2 and d = 3. The 2D model is plane strain with the given
(lambda, mu).
"""

import numpy as np

from ..config import settings
from ..errors import DimensionMismatchError, NonUnitNormalError
from ..models import LameParams


def _check_square(p: LameParams, g: np.ndarray, name: str) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim < 2 or g.shape[-2:] != (p.d, p.d):
        raise DimensionMismatchError(
            f"{name} has trailing shape {g.shape[-2:]}, expected ({p.d}, {p.d})"
        )
    return g


def strain(g: np.ndarray) -> np.ndarray:
    """Symmetric part e(u) of a gradient array."""
    g = np.asarray(g, dtype=float)
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def divergence(g: np.ndarray) -> np.ndarray:
    """Trace of a gradient array."""
    return np.trace(np.asarray(g, dtype=float), axis1=-2, axis2=-1)


def energy_density(p: LameParams, gu: np.ndarray, gv: np.ndarray) -> np.ndarray:
    """
    Bilinear energy density (C e(u), e(v)).

    Args:
        p: Lamé parameters
        gu: Gradient of u, shape (..., d, d)
        gv: Gradient of v, broadcastable against gu

    Returns:
        Array of the broadcast leading shape
    """
    gu = _check_square(p, gu, "gu")
    gv = _check_square(p, gv, "gv")
    lam, mu = p.lam, p.mu

    if p.d == 2:
        u11, u12 = gu[..., 0, 0], gu[..., 0, 1]
        u21, u22 = gu[..., 1, 0], gu[..., 1, 1]
        v11, v12 = gv[..., 0, 0], gv[..., 0, 1]
        v21, v22 = gv[..., 1, 0], gv[..., 1, 1]
        return lam * (u11 + u22) * (v11 + v22) + mu * (
            2 * u11 * v11 + (u12 + u21) * (v12 + v21) + 2 * u22 * v22
        )

    u11, u12, u13 = gu[..., 0, 0], gu[..., 0, 1], gu[..., 0, 2]
    u21, u22, u23 = gu[..., 1, 0], gu[..., 1, 1], gu[..., 1, 2]
    u31, u32, u33 = gu[..., 2, 0], gu[..., 2, 1], gu[..., 2, 2]
    v11, v12, v13 = gv[..., 0, 0], gv[..., 0, 1], gv[..., 0, 2]
    v21, v22, v23 = gv[..., 1, 0], gv[..., 1, 1], gv[..., 1, 2]
    v31, v32, v33 = gv[..., 2, 0], gv[..., 2, 1], gv[..., 2, 2]
    return lam * (u11 + u22 + u33) * (v11 + v22 + v33) + mu * (
        2 * u11 * v11
        + 2 * u22 * v22
        + 2 * u33 * v33
        + (u12 + u21) * (v12 + v21)
        + (u13 + u31) * (v13 + v31)
        + (u23 + u32) * (v23 + v32)
    )


def traction_form(p: LameParams, gu: np.ndarray, n: np.ndarray) -> np.ndarray:
    """
    Conormal derivative lambda (div u) n + mu (grad u + grad u^T) n.

    Args:
        p: Lamé parameters
        gu: Gradient of u, shape (..., d, d)
        n: Unit normal, shape (..., d)

    Returns:
        Traction vectors of shape (..., d)
    """
    gu = _check_square(p, gu, "gu")
    n = np.asarray(n, dtype=float)
    if n.shape[-1] != p.d:
        raise DimensionMismatchError(f"normal has length {n.shape[-1]}, expected {p.d}")
    if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1.0) > settings.normal_tol):
        raise NonUnitNormalError("normal vector must have unit length")

    sym = gu + np.swapaxes(gu, -1, -2)
    return p.lam * divergence(gu)[..., None] * n + p.mu * np.einsum("...ij,...j->...i", sym, n)


def apply_lame(p: LameParams, hessian: np.ndarray) -> np.ndarray:
    """
    Lamé operator mu Lap u + (lambda + mu) grad div u from second derivatives.

    Args:
        p: Lamé parameters
        hessian: H[..., i, j, k] = d^2 u^i / dx_j dx_k

    Returns:
        Array of shape (..., d)
    """
    h = np.asarray(hessian, dtype=float)
    if h.shape[-3:] != (p.d, p.d, p.d):
        raise DimensionMismatchError(f"hessian has trailing shape {h.shape[-3:]}")
    laplacian = np.einsum("...ijj->...i", h)
    grad_div = np.einsum("...jji->...i", h)
    return p.mu * laplacian + (p.lam + p.mu) * grad_div
