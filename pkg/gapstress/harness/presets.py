"""
Named boundary data phi on the outer boundary.
"""

from abc import ABC, abstractmethod
from typing import Dict, List, Type

import numpy as np
import structlog

from ..elasticity.rigid import RigidMotion
from ..errors import ConfigError

logger = structlog.get_logger()


class BoundaryData(ABC):
    """Outer boundary data as a vectorized function of points (n, 2) -> (n, 2)."""

    name: str = ""
    # parity of (phi^1, phi^2) under x_1 -> -x_1 and x_2 -> -x_2
    symmetry: str = ""
    # phi vanishes identically, so every blow-up factor is zero
    trivial: bool = False

    @abstractmethod
    def __call__(self, points: np.ndarray) -> np.ndarray:
        pass

    def describe(self) -> str:
        return f"{self.name} ({self.symmetry})"


class ShearData(BoundaryData):
    """phi = (x_2, 0)."""

    name = "shear"
    symmetry = "phi^1 even in x_1, odd in x_2"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = np.zeros_like(pts)
        out[:, 0] = pts[:, 1]
        return out


class StretchData(BoundaryData):
    """phi = (0, x_2)."""

    name = "stretch"
    symmetry = "phi^2 even in x_1, odd in x_2"

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = np.zeros_like(pts)
        out[:, 1] = pts[:, 1]
        return out


class ZeroData(BoundaryData):
    name = "zero"
    symmetry = "zero"
    trivial = True

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(points, dtype=float))


class RigidData(BoundaryData):
    """phi = psi_alpha; the exact solution is psi_alpha everywhere."""

    name = "rigid"
    symmetry = "rigid motion"

    def __init__(self, alpha: int = 1):
        if not 1 <= alpha <= 3:
            raise ConfigError(f"rigid preset needs alpha in 1..3, got {alpha}")
        self.alpha = alpha
        self._psi = RigidMotion(alpha=alpha, d=2)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self._psi(points)

    def describe(self) -> str:
        return f"rigid-{self.alpha} ({self.symmetry})"


class BoundaryDataFactory:
    """Registry of boundary-data presets."""

    _presets: Dict[str, Type[BoundaryData]] = {}

    @classmethod
    def register(cls, preset: Type[BoundaryData]) -> None:
        cls._presets[preset.name] = preset

    @classmethod
    def create(cls, name: str) -> BoundaryData:
        """
        Instantiate a preset by name; "rigid-2" selects psi_2.

        Raises:
            ConfigError: Unknown preset name
        """
        key = name.strip().lower()
        base, _, arg = key.partition("-")
        if base == "rigid":
            try:
                return RigidData(int(arg) if arg else 1)
            except ValueError as e:
                raise ConfigError(f"invalid rigid preset '{name}'") from e
        if key not in cls._presets:
            raise ConfigError(f"unknown boundary data '{name}'; available: {', '.join(cls.available())}")
        return cls._presets[key]()

    @classmethod
    def available(cls) -> List[str]:
        return sorted(cls._presets)


BoundaryDataFactory.register(ShearData)
BoundaryDataFactory.register(StretchData)
BoundaryDataFactory.register(ZeroData)
BoundaryDataFactory.register(RigidData)


def get_boundary_data(name: str) -> BoundaryData:
    return BoundaryDataFactory.create(name)
