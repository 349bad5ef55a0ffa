"""
Deterministic point sets inside the narrow region Omega_R.
"""

import math

import numpy as np

from ..models import InclusionPairGeometry
from .profile import gap_profile

_GOLDEN = (math.sqrt(5) - 1) / 2
_PLASTIC = 0.7548776662466927


def _weyl(n: int, alpha: float, offset: float = 0.5) -> np.ndarray:
    return np.mod(offset + alpha * np.arange(1, n + 1), 1.0)


def narrow_region_samples(g: InclusionPairGeometry, n: int) -> np.ndarray:
    """
    Points strictly between the facing surfaces over |x'| <= R.

    The set always contains the segment x' = 0 and, when n >= 2, at least
    ceil(n / 10) points on the ridge |x'| in [eps^(1/m)/2, 2 eps^(1/m)].
    A single point is the gap midpoint, the origin.

    Args:
        g: Inclusion pair
        n: Number of points (>= 1)

    Returns:
        Array of shape (n, d)
    """
    if n < 1:
        raise ValueError("sample count must be positive")
    if n == 1:
        return np.zeros((1, g.d))

    prof = gap_profile(g)
    n_axis = max(1, n // 10)
    n_ridge = max(1, math.ceil(n / 10))
    n_rest = max(0, n - n_axis - n_ridge)

    ridge = g.eps ** (1.0 / g.m)
    lo, hi = min(0.5 * ridge, g.R), min(2.0 * ridge, g.R)
    radii = np.concatenate([
        np.zeros(n_axis),
        lo + (hi - lo) * _weyl(n_ridge, _GOLDEN),
        g.R * (np.arange(1, n_rest + 1) / max(n_rest, 1)),
    ])[:n]
    fractions = np.concatenate([
        np.arange(1, n_axis + 1) / (n_axis + 1),
        0.05 + 0.9 * _weyl(n - n_axis, _PLASTIC),
    ])

    k = np.arange(n)
    if g.d == 2:
        xp = (np.where(k % 2, -1.0, 1.0) * radii)[:, None]
    else:
        theta = 2 * np.pi * _weyl(n, _GOLDEN, offset=0.0)
        xp = radii[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)

    up, low = prof.surfaces(xp)
    xd = low + fractions * (up - low)
    return np.column_stack([xp, xd])
