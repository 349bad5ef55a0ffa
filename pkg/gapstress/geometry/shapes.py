"""
Concrete 2D inclusion shapes and domains for the oracle.

Maps circles and superellipses onto the m-convex model geometry and builds the
domain descriptors the mesher consumes.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import structlog

from ..errors import GeometryError
from ..models import InclusionPairGeometry, OuterBoundary, OuterKind

logger = structlog.get_logger()


class Superellipse:
    """
    Closed curve |x - cx|^m + |y - cy|^m = r^m.

    Its bottom point is flattened like y = cy - r + |x|^m / (m r^(m-1)), so a
    pair of them at distance eps has relative convexity kappa = 2/(m r^(m-1)).
    """

    def __init__(self, center: Tuple[float, float], radius: float, order: int = 2):
        if radius <= 0:
            raise GeometryError("radius must be positive")
        if order < 2:
            raise GeometryError("superellipse order must be >= 2")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.order = int(order)

    def point(self, t: np.ndarray) -> np.ndarray:
        """Boundary point at angle-like parameter t."""
        t = np.asarray(t, dtype=float)
        e = 2.0 / self.order
        c, s = np.cos(t), np.sin(t)
        x = np.sign(c) * np.abs(c) ** e
        y = np.sign(s) * np.abs(s) ** e
        return self.center + self.radius * np.stack([x, y], axis=-1)

    def level(self, pts: np.ndarray) -> np.ndarray:
        """|x/r|^m + |y/r|^m for points relative to the centre; < 1 inside."""
        q = (np.asarray(pts, dtype=float) - self.center) / self.radius
        return np.sum(np.abs(q) ** self.order, axis=-1)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return self.level(pts) < 1.0

    def depth(self, x: np.ndarray) -> np.ndarray:
        """Half-height r (1 - |x/r|^m)^(1/m) of the curve above/below its centre."""
        q = np.clip(np.abs(np.asarray(x, dtype=float)) / self.radius, 0.0, 1.0)
        return self.radius * (1.0 - q ** self.order) ** (1.0 / self.order)

    def lower_surface(self, x: np.ndarray) -> np.ndarray:
        return self.center[1] - self.depth(x)

    def upper_surface(self, x: np.ndarray) -> np.ndarray:
        return self.center[1] + self.depth(x)

    def facing_parameter(self, x: float, lower_side: bool) -> float:
        """Parameter of the boundary point with abscissa x >= 0 on the lower or upper side."""
        c = (x / self.radius) ** (self.order / 2.0)
        t = math.acos(min(1.0, c))
        return -t if lower_side else t

    @property
    def relative_convexity(self) -> float:
        """Coefficient of |x|^m in the height of the flattened bottom point."""
        return 1.0 / (self.order * self.radius ** (self.order - 1))


class Circle(Superellipse):
    """Disk boundary (a superellipse of order 2)."""

    def __init__(self, center: Tuple[float, float], radius: float):
        super().__init__(center, radius, order=2)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        d = np.asarray(pts, dtype=float) - self.center
        return np.einsum("...i,...i->...", d, d) < self.radius ** 2


@dataclass(frozen=True)
class OuterDisk:
    radius: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.linalg.norm(np.asarray(pts, dtype=float), axis=-1) < self.radius

    @property
    def diameter(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class OuterRectangle:
    L1: float
    L2: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        p = np.asarray(pts, dtype=float)
        return (np.abs(p[..., 0]) < self.L1) & (np.abs(p[..., 1]) < self.L2)

    @property
    def diameter(self) -> float:
        return 2 * math.hypot(self.L1, self.L2)


Outer = Union[OuterDisk, OuterRectangle]


@dataclass(frozen=True)
class PairDomain:
    """
    Planar domain: outer boundary minus two inclusions facing each other at the origin.

    In cell mode the inclusions are half-disks cut by the top and bottom edges of
    the rectangle; the top boundary moves with the upper inclusion, the bottom one
    with the lower inclusion, and the sides are traction free.
    """
    upper: Superellipse
    lower: Superellipse
    outer: Outer
    eps: float
    R: float
    cell: bool = False

    @property
    def symmetric_y(self) -> bool:
        return (
            self.upper.radius == self.lower.radius
            and self.upper.order == self.lower.order
            and self.upper.center[1] == -self.lower.center[1]
        )

    @property
    def diameter(self) -> float:
        return self.outer.diameter

    @property
    def inclusion_diameter(self) -> float:
        return 2 * min(self.upper.radius, self.lower.radius)

    def y_up(self, x: np.ndarray) -> np.ndarray:
        return self.upper.lower_surface(x)

    def y_low(self, x: np.ndarray) -> np.ndarray:
        return self.lower.upper_surface(x)

    def gap_width(self, x: np.ndarray) -> np.ndarray:
        return self.y_up(x) - self.y_low(x)

    def inclusion_index(self, pts: np.ndarray) -> np.ndarray:
        """0 for matrix points, 1 or 2 inside the upper or lower inclusion."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1], dtype=int)
        out[self.upper.contains(pts)] = 1
        out[self.lower.contains(pts)] = 2
        return out

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return self.outer.contains(pts) & (self.inclusion_index(pts) == 0)

    def with_eps(self, eps: float) -> "PairDomain":
        up_c = self.upper.center.copy()
        lo_c = self.lower.center.copy()
        if self.cell:
            return cell_domain(self.outer.L1, self.outer.L2, eps, R=self.R)
        up_c[1] = eps / 2 + self.upper.radius
        lo_c[1] = -eps / 2 - self.lower.radius
        return PairDomain(
            upper=_shape_like(self.upper, up_c),
            lower=_shape_like(self.lower, lo_c),
            outer=self.outer,
            eps=eps,
            R=self.R,
        )


def _shape_like(shape: Superellipse, center: np.ndarray) -> Superellipse:
    if shape.order == 2:
        return Circle(tuple(center), shape.radius)
    return Superellipse(tuple(center), shape.radius, shape.order)


def disk_pair_kappa(r1: float, r2: float) -> float:
    """Relative convexity 1/(2 r1) + 1/(2 r2); an infinite radius is a half-plane."""
    return sum(0.0 if math.isinf(r) else 1.0 / (2.0 * r) for r in (r1, r2))


def _check_fit(half_extent: float, R_outer: float, clearance: float) -> None:
    if half_extent + clearance >= R_outer:
        raise GeometryError(
            f"inclusions reach |x| = {half_extent:.6g}, outer radius {R_outer} leaves "
            f"less than the clearance {clearance}"
        )


def disks_to_model(
    r1: float,
    r2: float,
    eps: float,
    R_outer: float,
    clearance: Optional[float] = None,
) -> InclusionPairGeometry:
    """
    Model geometry (m = 2) of two disks at distance eps inside an outer disk.

    Each circle near its closest point is x_2 = +-(eps/2 + |x_1|^2/(2 r_i)) to
    second order, so kappa_i = 1/(2 r_i) and kappa = kappa_1 + kappa_2.

    Args:
        r1: Radius of the upper disk
        r2: Radius of the lower disk
        eps: Distance between the disks
        R_outer: Radius of the outer disk centred at the origin
        clearance: Minimal distance between the inclusions and the outer boundary

    Returns:
        InclusionPairGeometry with m=2 and radii recorded
    """
    if r1 <= 0 or r2 <= 0:
        raise GeometryError("radii must be positive")
    clearance = 0.1 * R_outer if clearance is None else clearance
    # farthest point of a disk centred at (0, eps/2 + r) is at eps/2 + 2r
    _check_fit(eps / 2 + 2 * max(r1, r2), R_outer, clearance)
    return InclusionPairGeometry(
        d=2,
        m=2,
        kappa=disk_pair_kappa(r1, r2),
        eps=eps,
        R=0.5 * min(r1, r2),
        outer=OuterBoundary(kind=OuterKind.DISK, radius=R_outer),
        radii=(r1, r2),
    )


def superellipses_to_model(
    r: float,
    m: int,
    eps: float,
    R_outer: float,
    clearance: Optional[float] = None,
) -> InclusionPairGeometry:
    """
    Model geometry of two equal superellipses of order m at distance eps.

    Args:
        r: Superellipse radius
        m: Order (m = 2 gives disks)
        eps: Distance between the inclusions
        R_outer: Radius of the outer disk
        clearance: Minimal distance to the outer boundary

    Returns:
        InclusionPairGeometry with kappa = 2/(m r^(m-1))
    """
    if r <= 0:
        raise GeometryError("radius must be positive")
    clearance = 0.1 * R_outer if clearance is None else clearance
    shape = Superellipse((0.0, eps / 2 + r), r, m)
    extent = float(np.max(np.linalg.norm(shape.point(np.linspace(0, 2 * np.pi, 2001)), axis=-1)))
    _check_fit(extent, R_outer, clearance)
    return InclusionPairGeometry(
        d=2,
        m=m,
        kappa=2.0 / (m * r ** (m - 1)),
        eps=eps,
        R=(0.5 if m == 2 else 0.7) * r,
        outer=OuterBoundary(kind=OuterKind.DISK, radius=R_outer),
        radii=(r, r),
    )


def geometry_domain(g: InclusionPairGeometry) -> PairDomain:
    """
    Concrete 2D domain realising a model geometry.

    Recorded radii are used when present; otherwise both inclusions get the radius
    matching kappa (1/kappa for disks, (2/(m kappa))^(1/(m-1)) for superellipses).
    """
    if g.d != 2:
        raise GeometryError("only 2D geometries can be meshed")
    if g.outer.kind == OuterKind.RECTANGLE:
        L1, L2 = g.outer.half_lengths
        return cell_domain(L1, L2, g.eps, R=g.R)

    if g.radii is not None:
        r1, r2 = g.radii
    else:
        r1 = r2 = (2.0 / (g.m * g.kappa)) ** (1.0 / (g.m - 1))
    if g.R >= min(r1, r2):
        raise GeometryError(f"chart half-width R={g.R} must be below the inclusion radius")

    if g.m == 2:
        upper: Superellipse = Circle((0.0, g.eps / 2 + r1), r1)
        lower: Superellipse = Circle((0.0, -g.eps / 2 - r2), r2)
    else:
        upper = Superellipse((0.0, g.eps / 2 + r1), r1, g.m)
        lower = Superellipse((0.0, -g.eps / 2 - r2), r2, g.m)
    return PairDomain(upper=upper, lower=lower, outer=OuterDisk(g.outer.radius), eps=g.eps, R=g.R)


def cell_domain(L1: float, L2: float, eps: float, R: Optional[float] = None) -> PairDomain:
    """
    Period cell (-L1, L1) x (-L2, L2) with half-disk fibres of radius L2 - eps/2.

    Args:
        L1: Horizontal half-length
        L2: Vertical half-length
        eps: Distance between the fibres
        R: Half-width of the structured gap block

    Returns:
        PairDomain in cell mode
    """
    r = L2 - eps / 2
    if not 0 < eps < L2:
        raise GeometryError("need 0 < eps < L2")
    if r >= L1:
        raise GeometryError("fibres must not touch the cell sides (L2 - eps/2 < L1)")
    R = 0.5 * r if R is None else R
    if R >= r:
        raise GeometryError("block half-width must be below the fibre radius")
    return PairDomain(
        upper=Circle((0.0, L2), r),
        lower=Circle((0.0, -L2), r),
        outer=OuterRectangle(L1, L2),
        eps=eps,
        R=R,
        cell=True,
    )


def cell_geometry(L1: float, L2: float, eps: float) -> InclusionPairGeometry:
    """Model geometry of the period cell; kappa = 1/r for equal fibres of radius r."""
    r = L2 - eps / 2
    return InclusionPairGeometry(
        d=2,
        m=2,
        kappa=1.0 / r,
        eps=eps,
        R=0.5 * r,
        outer=OuterBoundary(kind=OuterKind.RECTANGLE, half_lengths=(L1, L2)),
        radii=(r, r),
    )
