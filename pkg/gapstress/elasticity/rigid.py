"""
Rigid displacements psi_alpha spanning the kernel of the strain operator.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from ..errors import UnsupportedDimensionError


def rigid_count(d: int) -> int:
    """Number of rigid motions d(d+1)/2."""
    if d not in (2, 3):
        raise UnsupportedDimensionError(f"unsupported dimension d={d}")
    return d * (d + 1) // 2


def _rotation_pairs(d: int) -> List[Tuple[int, int]]:
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


@dataclass(frozen=True)
class RigidMotion:
    """
    One element psi_alpha of the rigid basis (alpha is 1-based).

    For alpha <= d it is the translation e_alpha; otherwise it is the
    infinitesimal rotation x_j e_k - x_k e_j for the matching pair j < k.
    """
    alpha: int
    d: int

    @property
    def pair(self) -> Optional[Tuple[int, int]]:
        """Zero-based (j, k) for rotations, None for translations."""
        if self.alpha <= self.d:
            return None
        return _rotation_pairs(self.d)[self.alpha - self.d - 1]

    @property
    def gradient(self) -> np.ndarray:
        """Constant d x d matrix G[i, j] = d psi^i / d x_j (skew)."""
        g = np.zeros((self.d, self.d))
        pair = self.pair
        if pair is not None:
            j, k = pair
            g[k, j] = 1.0
            g[j, k] = -1.0
        return g

    @property
    def translation(self) -> np.ndarray:
        t = np.zeros(self.d)
        if self.alpha <= self.d:
            t[self.alpha - 1] = 1.0
        return t

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        return self.translation + x @ self.gradient.T


@lru_cache(maxsize=None)
def _basis(d: int) -> Tuple[RigidMotion, ...]:
    return tuple(RigidMotion(alpha=a, d=d) for a in range(1, rigid_count(d) + 1))


def rigid_basis(d: int) -> List[RigidMotion]:
    """
    Ordered rigid basis: e_1..e_d, then x_j e_k - x_k e_j for j < k.

    Args:
        d: Spatial dimension, 2 or 3

    Returns:
        List of d(d+1)/2 RigidMotion objects
    """
    return list(_basis(d))


def rigid_values(d: int, x: np.ndarray) -> np.ndarray:
    """All basis motions at points x: array of shape (n_rigid, ..., d)."""
    return np.stack([psi(x) for psi in rigid_basis(d)])
